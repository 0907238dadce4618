#pragma once

// Closed-form interference statistics: moments, moment-matched fits, outage
// probability through LT derivatives, and the SIR distribution obtained when
// the interference is replaced by its inverse-Gamma fit.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "femtoint/errors.hpp"
#include "femtoint/jet.hpp"
#include "femtoint/laplace.hpp"
#include "femtoint/scenario.hpp"
#include "femtoint/specfun.hpp"

namespace femtoint {

// --- moments -----------------------------------------------------------------

struct InterferenceMoments {
    double mean = 0.0;          // E{I} [mW]
    double second_moment = 0.0; // E{I^2} [mW^2]
    double variance = 0.0;      // kept alongside to avoid cancellation in E{I^2} - E{I}^2

    static InterferenceMoments from_mean_variance(double mean, double variance)
    {
        return {mean, variance + mean * mean, variance};
    }
};

/// E{I} = 2 lambda z (1 + zeta(alpha)/D^alpha),
/// Var{I} = (4 lambda z^2 / 3)(1 + zeta(2 alpha)/D^{2 alpha}).
/// Non-singular model (the singular model has no finite mean).
inline InterferenceMoments moments(double lambda, double z, double alpha, double spacing,
                                   bool include_horizontal = false, bool include_facing = true)
{
    if (!(alpha > 2.0))
        throw domain_error("moments: requires alpha > 2");
    const double facing = include_facing ? 1.0 : 0.0;
    const double s1 = facing + specfun::riemann_zeta(alpha) * std::pow(spacing, -alpha);
    const double s2 = facing + specfun::riemann_zeta(2.0 * alpha) * std::pow(spacing, -2.0 * alpha);
    const double families = include_horizontal ? 2.0 : 1.0;
    const double mean = families * 2.0 * lambda * z * s1;
    const double var = families * (4.0 * lambda * z * z / 3.0) * s2;
    return InterferenceMoments::from_mean_variance(mean, var);
}

inline InterferenceMoments moments(const ScenarioConfig& cfg, const PathlossModel& pl,
                                   bool include_facing = true)
{
    return moments(cfg.traffic.density, cfg.composite_gain(), cfg.radio.pathloss_exponent,
                   cfg.grid.street_spacing(), pl.include_horizontal, include_facing);
}

/// Moments of exactly what the simulator draws: streets inside the window,
/// cars at 1 <= |x1| <= W/2. The difference to moments() is the truncation
/// correction reported with every simulation comparison.
inline InterferenceMoments window_moments(const ScenarioConfig& cfg, const PathlossModel& pl,
                                          bool include_facing = true)
{
    if (pl.variant != PathlossVariant::NonSingular)
        throw domain_error("window_moments: the singular model has no finite moments");
    const double lambda = cfg.traffic.density;
    const double z = cfg.composite_gain();
    const double h = cfg.grid.window_side / 2.0;
    double s1 = 0.0, s2 = 0.0;
    for (int k = include_facing ? 0 : 1; k <= cfg.grid.last_street_in_window(); ++k) {
        const double b = beta_k(cfg.grid, cfg.radio.pathloss_exponent, k);
        s1 += 1.0 / b;
        s2 += 1.0 / (b * b);
    }
    const double families = pl.include_horizontal ? 2.0 : 1.0;
    const double mean = families * 2.0 * lambda * z * s1 * (1.0 - 1.0 / h);
    const double var = families * (4.0 * lambda * z * z / 3.0) * s2 * (1.0 - 1.0 / (h * h * h));
    return InterferenceMoments::from_mean_variance(mean, var);
}

// --- fitted distributions ----------------------------------------------------

enum class Family { InverseGamma, Gamma };

inline std::string to_string(Family f) { return f == Family::InverseGamma ? "inverse_gamma" : "gamma"; }

inline double inv_gamma_ccdf(double x, double shape, double scale)
{
    if (!(x > 0.0))
        throw domain_error("inv_gamma_ccdf: requires x > 0");
    // I > x  <=>  1/I < 1/x, and 1/I ~ Gamma(shape, 1/scale)
    return specfun::reg_gamma_lower(shape, scale / x);
}

inline double gamma_ccdf(double x, double shape, double scale)
{
    if (!(x > 0.0))
        throw domain_error("gamma_ccdf: requires x > 0");
    return specfun::reg_gamma_upper(shape, x / scale);
}

struct FittedDistribution {
    Family family = Family::InverseGamma;
    double shape = 0.0; // a (inverse Gamma) or k (Gamma)
    double scale = 0.0; // b (inverse Gamma) or theta (Gamma) [mW]

    double mean() const
    {
        return family == Family::InverseGamma ? scale / (shape - 1.0) : shape * scale;
    }

    double variance() const
    {
        if (family == Family::Gamma)
            return shape * scale * scale;
        return scale * scale / ((shape - 1.0) * (shape - 1.0) * (shape - 2.0));
    }

    double ccdf(double x) const
    {
        return family == Family::InverseGamma ? inv_gamma_ccdf(x, shape, scale)
                                              : gamma_ccdf(x, shape, scale);
    }
};

/// Inverse Gamma by moment matching: shape a = mean^2/var + 2 (so a > 2),
/// scale b = mean (a - 1).
inline FittedDistribution fit_inverse_gamma(const InterferenceMoments& mom)
{
    if (!(mom.variance > 0.0) || !(mom.mean > 0.0))
        throw degenerate_error("fit_inverse_gamma: requires positive mean and variance");
    const double a = mom.mean * mom.mean / mom.variance + 2.0;
    return {Family::InverseGamma, a, mom.mean * (a - 1.0)};
}

inline FittedDistribution fit_gamma(const InterferenceMoments& mom)
{
    if (!(mom.variance > 0.0) || !(mom.mean > 0.0))
        throw degenerate_error("fit_gamma: requires positive mean and variance");
    return {Family::Gamma, mom.mean * mom.mean / mom.variance, mom.variance / mom.mean};
}

// --- outage --------------------------------------------------------------------

/// P(SIR <= gamma) for Nakagami-m wanted signal:
///   1 - sum_{i<m} (-xi)^i / i! * L^(i)(xi),  xi = m gamma / mean_rx.
/// The derivatives come from an order m-1 jet pushed through the LT exponent.
template <class Laplace>
double outage_probability(double sir_target, const FemtoParams& femto, const Laplace& lt)
{
    femto.validate();
    if (!(sir_target > 0.0))
        throw domain_error("outage_probability: requires gamma > 0");
    const int m = femto.nakagami_m;
    const double xi = m * sir_target / femto.mean_rx_power_mw;

    const Jet s = Jet::variable(xi, static_cast<std::size_t>(m - 1));
    const Jet transform = exp(-lt.exponent(s));
    // c_i = L^(i)(xi) / i!, so the i-th summand is (-xi)^i c_i.
    double covered = 0.0;
    double power = 1.0;
    for (int i = 0; i < m; ++i) {
        covered += power * transform[static_cast<std::size_t>(i)];
        power *= -xi;
    }
    double p = 1.0 - covered;
    constexpr double slack = 1e-9;
    if (p < -slack || p > 1.0 + slack || !std::isfinite(p))
        throw numerical_error("outage_probability: derivative evaluation left [0,1]: "
                              + std::to_string(p));
    return std::clamp(p, 0.0, 1.0);
}

// --- SIR distribution under the inverse-Gamma interference model --------------

struct SirModelParams {
    int m = 1;
    double theta = 1e-4; // P_rx scale [mW]
    double a = 2.3;      // inverse-Gamma shape
    double b = 1.0;      // inverse-Gamma scale [mW]

    /// gamma_n = (b / theta) gamma.
    double normalize(double sir) const { return b / theta * sir; }
    double denormalize(double sir_n) const { return theta / b * sir_n; }
};

inline SirModelParams make_sir_params(const FemtoParams& femto, const FittedDistribution& fit)
{
    if (fit.family != Family::InverseGamma)
        throw domain_error("make_sir_params: needs an inverse-Gamma interference fit");
    return {femto.nakagami_m, femto.theta(), fit.shape, fit.scale};
}

/// Density of gamma_n = g1 g2 with g1 ~ Gamma(m,1), g2 ~ Gamma(a,1):
///   2 gamma_n^{(m+a)/2 - 1} K_{m-a}(2 sqrt(gamma_n)) / (Gamma(m) Gamma(a)).
/// (The -1 in the exponent is what makes it integrate to one.)
inline double sir_pdf_normalized(double gn, double m, double a)
{
    if (!(gn > 0.0))
        throw domain_error("sir_pdf_normalized: requires gamma_n > 0");
    if (!(m > 0.0) || !(a > 0.0))
        throw domain_error("sir_pdf_normalized: requires m, a > 0");
    const double nu = std::abs(m - a);
    const double norm = std::lgamma(m) + std::lgamma(a);
    if (gn < 1e-12 && nu > 1e-6) {
        // leading small-argument term; avoids K overflow near the origin
        return std::exp(std::lgamma(nu) + (std::min(m, a) - 1.0) * std::log(gn) - norm);
    }
    const double y = 2.0 * std::sqrt(gn);
    if (y > 1400.0)
        return 0.0;
    const double k = specfun::bessel_k(nu, y);
    if (k == 0.0)
        return 0.0;
    return std::exp(std::log(2.0) + ((m + a) / 2.0 - 1.0) * std::log(gn) + std::log(k) - norm);
}

enum class SirCdfPath { Series, Quadrature };

struct SirCdfEvaluation {
    double value = 0.0;
    SirCdfPath path = SirCdfPath::Series;
};

namespace detail {

inline double sir_cdf_quadrature(double gn, double m, double a)
{
    auto pdf = [m, a](double x) { return x > 0.0 ? sir_pdf_normalized(x, m, a) : 0.0; };
    // Integrate whichever side of gamma_n holds less mass.
    if (gn <= m * a) {
        boost::math::quadrature::tanh_sinh<double> integrator;
        return std::clamp(integrator.integrate(pdf, 0.0, gn, 1e-13), 0.0, 1.0);
    }
    boost::math::quadrature::exp_sinh<double> integrator;
    auto shifted = [&](double t) { return pdf(gn + t); };
    return std::clamp(1.0 - integrator.integrate(shifted, 0.0, std::numeric_limits<double>::infinity(), 1e-13),
                      0.0, 1.0);
}

} // namespace detail

/// CDF of gamma_n via the two-term 1F2 expansion
///   [Gamma(a-m) g^m/m 1F2(m; m+1-a, m+1; g) + Gamma(m-a) g^a/a 1F2(a; a+1-m, a+1; g)]
///   / (Gamma(m) Gamma(a)).
/// Falls back to quadrature of the density when m - a is within 1e-3 of an
/// integer (pole of the prefactors) or when cancellation between the two
/// alternating terms would cost more than ~1e-9 absolute.
inline SirCdfEvaluation sir_cdf_normalized_detail(double gn, double m, double a,
                                                  const specfun::SeriesControl& ctrl = {})
{
    if (!(m > 0.0) || !(a > 0.0))
        throw domain_error("sir_cdf: requires m, a > 0");
    if (!(gn >= 0.0))
        throw domain_error("sir_cdf: requires gamma_n >= 0");
    if (gn == 0.0)
        return {0.0, SirCdfPath::Series};
    if (std::isinf(gn))
        return {1.0, SirCdfPath::Series};

    const double d = m - a;
    if (std::abs(d - std::nearbyint(d)) < 1e-3)
        return {detail::sir_cdf_quadrature(gn, m, a), SirCdfPath::Quadrature};

    const double norm = std::exp(std::lgamma(m) + std::lgamma(a));
    const double c1 = specfun::gamma_signed(a - m) * std::pow(gn, m) / m / norm;
    const double c2 = specfun::gamma_signed(m - a) * std::pow(gn, a) / a / norm;
    try {
        const auto s1 = specfun::hyp1f2_series(m, m + 1.0 - a, m + 1.0, gn, ctrl);
        const auto s2 = specfun::hyp1f2_series(a, a + 1.0 - m, a + 1.0, gn, ctrl);
        const double cancellation = std::numeric_limits<double>::epsilon()
                                    * (std::abs(c1) * s1.max_abs_term * s1.terms
                                       + std::abs(c2) * s2.max_abs_term * s2.terms);
        const double value = c1 * s1.value + c2 * s2.value;
        if (cancellation <= 1e-9 && std::isfinite(value))
            return {std::clamp(value, 0.0, 1.0), SirCdfPath::Series};
    } catch (const convergence_error&) {
    }
    return {detail::sir_cdf_quadrature(gn, m, a), SirCdfPath::Quadrature};
}

inline double sir_cdf_normalized(double gn, double m, double a)
{
    return sir_cdf_normalized_detail(gn, m, a).value;
}

/// P(SIR <= gamma) under the inverse-Gamma interference model.
inline double sir_cdf(double sir, const SirModelParams& p)
{
    if (!(sir >= 0.0))
        throw domain_error("sir_cdf: requires gamma >= 0");
    return sir_cdf_normalized(p.normalize(sir), p.m, p.a);
}

/// E[10 log10 SIR] under the model: log of a product of independent Gammas,
/// 10 log10(theta/b) + 10/ln(10) (psi(m) + psi(a)).
inline double sir_model_mean_db(const SirModelParams& p)
{
    return linear_to_db(p.theta / p.b)
           + 10.0 / std::numbers::ln10 * (specfun::digamma(p.m) + specfun::digamma(p.a));
}

// --- facing street -------------------------------------------------------------

/// Analytic drop of the mean interference when the k = 0 street is removed:
/// 10 log10((1 + zeta(alpha)/D^alpha) / (zeta(alpha)/D^alpha)).
/// lambda and z cancel (both means scale with 2 lambda z).
inline double mean_delta_excluding_facing_street([[maybe_unused]] double lambda,
                                                 [[maybe_unused]] double z, double alpha,
                                                 double spacing)
{
    if (!(alpha > 2.0))
        throw domain_error("mean_delta_excluding_facing_street: requires alpha > 2");
    const double rest = specfun::riemann_zeta(alpha) * std::pow(spacing, -alpha);
    return linear_to_db((1.0 + rest) / rest);
}

} // namespace femtoint
