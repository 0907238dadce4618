#pragma once

// Special functions used by the closed-form interference and SIR models.
// Everything here is a pure function of its arguments.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "femtoint/errors.hpp"

namespace femtoint::specfun {

/// Truncation control for the summed series (zeta, 1F2).
struct SeriesControl {
    double rel_tol = 1e-13;
    int max_terms = 200000;

    void validate() const
    {
        if (!(rel_tol > 0.0 && rel_tol <= 1e-3))
            throw domain_error("SeriesControl: rel_tol must be in (0, 1e-3]");
        if (max_terms < 50)
            throw domain_error("SeriesControl: max_terms must be >= 50");
    }
};

namespace detail {

// Euler-Maclaurin tail of sum_{k>=n} k^-s, through the B6 term. Also returns
// the magnitude of the first omitted (B8) term as an error bound.
inline double zeta_tail(double s, double n, double& bound)
{
    const double ns = std::pow(n, -s);
    double tail = n * ns / (s - 1.0) + 0.5 * ns;
    // B_{2j}/(2j)! for j = 1..4
    constexpr double coef[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0};
    double rising = s;       // s (s+1) ... (s+2j-2)
    double power = ns / n;   // n^{-s-2j+1}
    for (int j = 0; j < 3; ++j) {
        tail += coef[j] * rising * power;
        rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
        power /= n * n;
    }
    bound = std::abs(coef[3] * rising * power);
    return tail;
}

} // namespace detail

/// Riemann zeta for real s > 1: partial sum plus Euler-Maclaurin tail,
/// with the cut-off doubled until the omitted-term bound meets ctrl.rel_tol.
inline double riemann_zeta(double s, const SeriesControl& ctrl = {})
{
    ctrl.validate();
    if (!(s > 1.0))
        throw domain_error("riemann_zeta: requires s > 1, got " + std::to_string(s));

    int n = 8;
    double partial = 0.0;
    int summed = 0; // terms 1..summed are in `partial`
    while (true) {
        for (int k = summed + 1; k < n; ++k)
            partial += std::pow(static_cast<double>(k), -s);
        summed = n - 1;
        double bound = 0.0;
        const double value = partial + detail::zeta_tail(s, n, bound);
        if (bound <= ctrl.rel_tol * value)
            return value;
        if (2 * n > ctrl.max_terms)
            throw convergence_error("riemann_zeta: no convergence within max_terms");
        n *= 2;
    }
}

inline double log_gamma(double x)
{
    if (!(x > 0.0))
        throw domain_error("log_gamma: requires x > 0");
    return std::lgamma(x);
}

inline double gamma_fn(double x)
{
    if (!(x > 0.0))
        throw domain_error("gamma_fn: requires x > 0");
    return std::tgamma(x);
}

/// Gamma function on the whole real line except the poles (needed for the
/// Gamma(a-m), Gamma(m-a) prefactors of the SIR CDF expansion).
inline double gamma_signed(double x)
{
    if (x <= 0.0 && x == std::nearbyint(x))
        throw domain_error("gamma_signed: pole at non-positive integer");
    return std::tgamma(x);
}

inline double digamma(double x)
{
    if (!(x > 0.0))
        throw domain_error("digamma: requires x > 0");
    return boost::math::digamma(x);
}

/// Regularized upper incomplete gamma Q(a, x).
inline double reg_gamma_upper(double a, double x)
{
    if (!(a > 0.0))
        throw domain_error("reg_gamma_upper: requires a > 0");
    if (!(x >= 0.0))
        throw domain_error("reg_gamma_upper: requires x >= 0");
    if (x == 0.0)
        return 1.0;
    if (std::isinf(x))
        return 0.0;
    return boost::math::gamma_q(a, x);
}

/// Regularized lower incomplete gamma P(a, x) = 1 - Q(a, x), evaluated
/// directly so small values keep their relative precision.
inline double reg_gamma_lower(double a, double x)
{
    if (!(a > 0.0))
        throw domain_error("reg_gamma_lower: requires a > 0");
    if (!(x >= 0.0))
        throw domain_error("reg_gamma_lower: requires x >= 0");
    if (x == 0.0)
        return 0.0;
    if (std::isinf(x))
        return 1.0;
    return boost::math::gamma_p(a, x);
}

/// Modified Bessel function of the second kind, real order. K_{-nu} = K_nu.
inline double bessel_k(double nu, double x)
{
    if (!(x > 0.0))
        throw domain_error("bessel_k: requires x > 0");
    return std::cyl_bessel_k(std::abs(nu), x);
}

struct SeriesResult {
    double value = 0.0;
    double max_abs_term = 0.0; // largest |term| seen; sizes the cancellation error
    int terms = 0;
};

/// 1F2(a; b1, b2; z) by term recursion, keeping the largest term magnitude.
inline SeriesResult hyp1f2_series(double a, double b1, double b2, double z,
                                  const SeriesControl& ctrl = {})
{
    ctrl.validate();
    auto is_pole = [](double b) { return b <= 0.0 && b == std::nearbyint(b); };
    if (is_pole(b1) || is_pole(b2))
        throw domain_error("hyp1f2: b1 and b2 must not be non-positive integers");
    if (!(z >= 0.0))
        throw domain_error("hyp1f2: requires z >= 0");

    SeriesResult out;
    out.value = 1.0;
    out.max_abs_term = 1.0;
    out.terms = 1;
    if (z == 0.0)
        return out;

    // Before this index the Pochhammer factors can still flip sign or grow.
    const double settle = std::max({0.0, -a, -b1, -b2}) + 1.0;
    double term = 1.0;
    for (int k = 0; k < ctrl.max_terms; ++k) {
        const double ratio = (a + k) * z / ((b1 + k) * (b2 + k) * (k + 1.0));
        term *= ratio;
        out.value += term;
        ++out.terms;
        out.max_abs_term = std::max(out.max_abs_term, std::abs(term));
        if (term == 0.0)
            return out; // a is a non-positive integer: the series terminates
        const double next_ratio =
            std::abs((a + k + 1) * z / ((b1 + k + 1) * (b2 + k + 1) * (k + 2.0)));
        if (k + 1 >= settle && next_ratio < 1.0) {
            const double tail = std::abs(term) * next_ratio / (1.0 - next_ratio);
            if (tail <= ctrl.rel_tol * std::abs(out.value))
                return out;
        }
    }
    throw convergence_error("hyp1f2: no convergence within max_terms");
}

inline double hyp1f2(double a, double b1, double b2, double z, const SeriesControl& ctrl = {})
{
    return hyp1f2_series(a, b1, b2, z, ctrl).value;
}

} // namespace femtoint::specfun
