#pragma once

// Laplace transforms L(s) = E[exp(-s I)] of the aggregate interference from
// the per-street Poisson processes. Every transform here has the form
// exp(-E(s)); the exponent E is templated on the scalar so a Jet can be pushed
// through it to obtain derivatives (see outage_probability).

#include <cmath>
#include <numbers>
#include <optional>

#include "femtoint/errors.hpp"
#include "femtoint/jet.hpp"
#include "femtoint/scenario.hpp"
#include "femtoint/specfun.hpp"

namespace femtoint {

using std::atan;
using std::exp;
using std::sqrt;

inline constexpr int kMaxStreetTerms = 1'000'000;

namespace detail {

template <class T>
T zero_like(const T& s)
{
    return s * 0.0;
}

} // namespace detail

// --- per street ------------------------------------------------------------

/// pi * lambda * sqrt(s z / beta): singular pathloss, NLOS distance from 0.
template <class T>
T singular_street_exponent(const T& s, double lambda, double z, double beta)
{
    if (value_of(s) == 0.0 || lambda * z == 0.0)
        return detail::zero_like(s);
    return std::numbers::pi * lambda * sqrt(s * (z / beta));
}

/// 2 lambda u atan(u), u = sqrt(s z / beta): non-singular pathloss, |x1| >= 1.
template <class T>
T nonsingular_street_exponent(const T& s, double lambda, double z, double beta)
{
    if (value_of(s) == 0.0 || lambda * z == 0.0)
        return detail::zero_like(s);
    const T u = sqrt(s * (z / beta));
    return 2.0 * lambda * u * atan(u);
}

template <class T>
T lt_singular_street(const T& s, double lambda, double z, double beta)
{
    return exp(-singular_street_exponent(s, lambda, z, beta));
}

template <class T>
T lt_nonsingular_street(const T& s, double lambda, double z, double beta)
{
    return exp(-nonsingular_street_exponent(s, lambda, z, beta));
}

// --- all vertical streets ----------------------------------------------------

/// pi lambda (1 + zeta(alpha/2) D^{-alpha/2}) sqrt(s z); the facing-street
/// term (the leading 1) can be dropped.
template <class T>
T singular_total_exponent(const T& s, double lambda, double z, double alpha, double spacing,
                          bool include_horizontal = false, bool include_facing = true)
{
    if (!(alpha > 2.0))
        throw domain_error("singular total LT requires alpha > 2");
    if (value_of(s) == 0.0 || lambda * z == 0.0)
        return detail::zero_like(s);
    const double streets = (include_facing ? 1.0 : 0.0)
                           + specfun::riemann_zeta(alpha / 2.0) * std::pow(spacing, -alpha / 2.0);
    const double families = include_horizontal ? 2.0 : 1.0;
    return (families * std::numbers::pi * lambda * streets) * sqrt(s * z);
}

/// 2 lambda sum_k u_k atan(u_k), truncated once the tail bound
/// 2 lambda s z D^-alpha K^{1-alpha} / (alpha - 1) drops below rel_tol of the
/// running exponent (uses atan(u) <= u).
template <class T>
T nonsingular_total_exponent(const T& s, double lambda, double z, double alpha, double spacing,
                             double rel_tol = 1e-12, bool include_horizontal = false,
                             bool include_facing = true)
{
    if (!(alpha > 2.0))
        throw domain_error("non-singular total LT requires alpha > 2");
    if (value_of(s) == 0.0 || lambda * z == 0.0)
        return detail::zero_like(s);
    const double sz = value_of(s) * z;
    T sum = include_facing ? nonsingular_street_exponent(s, lambda, z, 1.0) : detail::zero_like(s);
    for (int k = 1;; ++k) {
        sum += nonsingular_street_exponent(s, lambda, z, std::pow(k * spacing, alpha));
        const double tail =
            2.0 * lambda * sz * std::pow(spacing, -alpha) * std::pow(k, 1.0 - alpha) / (alpha - 1.0);
        if (tail <= rel_tol * value_of(sum))
            break;
        if (k >= kMaxStreetTerms)
            throw convergence_error("non-singular total LT: street sum exceeded 1e6 terms");
    }
    return include_horizontal ? 2.0 * sum : sum;
}

template <class T>
T lt_singular_total(const T& s, double lambda, double z, double alpha, double spacing,
                    bool include_horizontal = false)
{
    return exp(-singular_total_exponent(s, lambda, z, alpha, spacing, include_horizontal));
}

template <class T>
T lt_nonsingular_total(const T& s, double lambda, double z, double alpha, double spacing,
                       double rel_tol = 1e-12, bool include_horizontal = false)
{
    return exp(-nonsingular_total_exponent(s, lambda, z, alpha, spacing, rel_tol,
                                           include_horizontal));
}

// --- configurable model ------------------------------------------------------

/// Streets and car positions restricted to the simulated square: streets
/// k = 0..last_street, cars at near_limit <= |x1| <= half_extent.
struct WindowTruncation {
    double half_extent = 1000.0;
    int last_street = 14;
    double near_limit = 1.0;
};

/// A Laplace transform selected by pathloss variant, street subset, and
/// (optionally) the finite simulation window. With a window the per-street
/// integral of s z / (beta x^2 + s z) runs over [near_limit, half_extent]
/// instead of [0 or 1, inf), which makes this the exact transform of what
/// the snapshot simulator draws.
struct LaplaceModel {
    PathlossVariant variant = PathlossVariant::NonSingular;
    double density = 0.1;
    double gain = 1.0; // z [mW]
    double alpha = 4.0;
    double spacing = 70.0;
    bool include_horizontal = false;
    bool include_facing = true;
    std::optional<int> only_street;
    std::optional<WindowTruncation> window;
    double rel_tol = 1e-12;

    static LaplaceModel infinite(const ScenarioConfig& cfg, const PathlossModel& pl)
    {
        LaplaceModel m;
        m.variant = pl.variant;
        m.density = cfg.traffic.density;
        m.gain = cfg.composite_gain();
        m.alpha = cfg.radio.pathloss_exponent;
        m.spacing = cfg.grid.street_spacing();
        m.include_horizontal = pl.include_horizontal;
        return m;
    }

    /// Matches the simulator's truncation; see montecarlo.hpp.
    static LaplaceModel windowed(const ScenarioConfig& cfg, const PathlossModel& pl,
                                 double singular_guard = 1e-6)
    {
        LaplaceModel m = infinite(cfg, pl);
        WindowTruncation w;
        w.half_extent = cfg.grid.window_side / 2.0;
        w.last_street = cfg.grid.last_street_in_window();
        w.near_limit = pl.variant == PathlossVariant::NonSingular ? 1.0 : singular_guard;
        m.window = w;
        return m;
    }

    double beta(int k) const { return k == 0 ? 1.0 : std::pow(k * spacing, alpha); }

    template <class T>
    T exponent(const T& s) const
    {
        if (value_of(s) < 0.0)
            throw domain_error("Laplace transform requires s >= 0");
        if (value_of(s) == 0.0 || density * gain == 0.0)
            return detail::zero_like(s);
        const double families = include_horizontal ? 2.0 : 1.0;

        if (window)
            return families * windowed_exponent(s);

        if (only_street) {
            const double b = beta(*only_street);
            return families * (variant == PathlossVariant::Singular
                                   ? singular_street_exponent(s, density, gain, b)
                                   : nonsingular_street_exponent(s, density, gain, b));
        }
        if (variant == PathlossVariant::Singular)
            return singular_total_exponent(s, density, gain, alpha, spacing, include_horizontal,
                                           include_facing);
        return nonsingular_total_exponent(s, density, gain, alpha, spacing, rel_tol,
                                          include_horizontal, include_facing);
    }

    double operator()(double s) const { return std::exp(-exponent(s)); }

private:
    template <class T>
    T windowed_exponent(const T& s) const
    {
        const WindowTruncation& w = *window;
        int first = include_facing ? 0 : 1;
        int last = w.last_street;
        if (only_street) {
            first = *only_street;
            last = *only_street;
        }
        T sum = detail::zero_like(s);
        for (int k = first; k <= last; ++k) {
            // int_lo^hi s z / (beta x^2 + s z) dx = c (atan(hi/c) - atan(lo/c)), c = sqrt(s z / beta)
            const T c = sqrt(s * (gain / beta(k)));
            const T inv_c = 1.0 / c;
            sum += c * (atan(w.half_extent * inv_c) - atan(w.near_limit * inv_c));
        }
        return 2.0 * density * sum;
    }
};

} // namespace femtoint
