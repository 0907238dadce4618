#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "femtoint/analytic.hpp"
#include "femtoint/laplace.hpp"
#include "oracles.hpp"

using namespace femtoint;

namespace {

constexpr double kPi = std::numbers::pi;

// int_lo^inf c^2 / (x^2 + c^2) dx by Simpson over geometric pieces up to
// X = 1e4 c, plus the first two terms of the 1/x expansion beyond X.
double street_integral_oracle(double sz, double beta, double lo)
{
    const double c2 = sz / beta;
    const double c = std::sqrt(c2);
    auto f = [c2](double x) { return c2 / (x * x + c2); };
    const double X = 1e4 * std::max(c, 1.0);
    double total = 0.0;
    double a = lo;
    double b = std::max(lo, 1e-3 * c) + 1e-3 * c;
    while (a < X) {
        b = std::min(b, X);
        total += oracle::integrate(f, a, b, 1e-14 * c);
        a = b;
        b = 2.0 * b;
    }
    return total + c2 / X - c2 * c2 / (3.0 * X * X * X);
}

ScenarioConfig reference_config() { return {}; }

} // namespace

TEST(LaplaceStreet, ValuesAtOrigin)
{
    for (double lambda : {0.0, 0.01, 0.1}) {
        EXPECT_EQ(lt_singular_street(0.0, lambda, 1.0, 1.0), 1.0);
        EXPECT_EQ(lt_nonsingular_street(0.0, lambda, 1.0, 1.0), 1.0);
        EXPECT_EQ(lt_singular_total(0.0, lambda, 1.0, 4.0, 70.0), 1.0);
        EXPECT_EQ(lt_nonsingular_total(0.0, lambda, 1.0, 4.0, 70.0), 1.0);
    }
}

TEST(LaplaceStreet, ReferenceValues)
{
    // s z / beta = 1: exp(-0.1 pi) and exp(-0.2 atan 1)
    EXPECT_NEAR(lt_singular_street(1.0, 0.1, 1.0, 1.0), 0.73040269104864560, 1e-15);
    EXPECT_NEAR(lt_singular_street(2.4010e7, 0.1, 1.0, 2.4010e7), 0.73040269104864560, 1e-15);
    EXPECT_NEAR(lt_nonsingular_street(1.0, 0.1, 1.0, 1.0), 0.85463599915323342, 1e-15);
    EXPECT_NEAR(lt_singular_total(1.0, 0.1, 1.0, 4.0, 70.0), 0.73032566426718692, 1e-15);
}

TEST(LaplaceStreet, EmptyProcess)
{
    for (double s : {0.1, 1.0, 1e6}) {
        EXPECT_EQ(lt_singular_street(s, 0.0, 1.0, 1.0), 1.0);
        EXPECT_EQ(lt_nonsingular_street(s, 0.0, 1.0, 1.0), 1.0);
        EXPECT_EQ(lt_nonsingular_total(s, 0.0, 1.0, 4.0, 70.0), 1.0);
    }
}

TEST(LaplaceTotal, SingularProductMatchesPartialProduct)
{
    const ScenarioConfig cfg = reference_config();
    const double z = cfg.composite_gain();
    const double s = cfg.femto.sir_target / cfg.femto.mean_rx_power_mw;
    const double lambda = 0.1;
    const int K = 10000;
    double log_partial = 0.0;
    for (int k = K; k >= 0; --k)
        log_partial += std::log(lt_singular_street(s, lambda, z, beta_k(cfg.grid, 4.0, k)));
    const double log_total = std::log(lt_singular_total(s, lambda, z, 4.0, 70.0));
    // omitted streets: pi lambda sqrt(s z) D^-2 sum_{k>K} k^-2 <= ... / K
    const double tail = kPi * lambda * std::sqrt(s * z) / (70.0 * 70.0) / K;
    EXPECT_LE(std::abs(log_total - log_partial), tail + 1e-10);
    EXPECT_GT(std::abs(log_total - log_partial), 0.0);
}

TEST(LaplaceTotal, NonSingularMatchesLongPartialSum)
{
    const ScenarioConfig cfg = reference_config();
    const double z = cfg.composite_gain();
    const double s = cfg.femto.sir_target / cfg.femto.mean_rx_power_mw;
    const double adaptive = nonsingular_total_exponent(s, 0.1, z, 4.0, 70.0, 1e-12);
    const double tighter = nonsingular_total_exponent(s, 0.1, z, 4.0, 70.0, 1e-15);
    double brute = 0.0;
    for (int k = 200000; k >= 1; --k)
        brute += nonsingular_street_exponent(s, 0.1, z, std::pow(70.0 * k, 4.0));
    brute += nonsingular_street_exponent(s, 0.1, z, 1.0);
    EXPECT_NEAR(adaptive, brute, 1e-12 * brute);
    EXPECT_NEAR(tighter, brute, 1e-13 * brute);
}

TEST(LaplaceTotal, SmallDensityFirstOrder)
{
    const double lambda = 1e-6;
    for (double s : {0.3, 5.0, 400.0}) {
        const double e = nonsingular_total_exponent(s, lambda, 1.0, 4.0, 70.0);
        const double lt = lt_nonsingular_total(s, lambda, 1.0, 4.0, 70.0);
        EXPECT_NEAR(1.0 - lt, e, 0.01 * e);
        const double es = singular_total_exponent(s, lambda, 1.0, 4.0, 70.0);
        EXPECT_NEAR(1.0 - lt_singular_total(s, lambda, 1.0, 4.0, 70.0), es, 0.01 * es);
    }
}

TEST(LaplaceProperties, BoundedDecreasingAndDominated)
{
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> log_s(-3.0, 4.0), ul(0.0, 0.3);
    for (int i = 0; i < 200; ++i) {
        const double s = std::pow(10.0, log_s(gen));
        const double lambda = ul(gen) + 1e-4;
        const double beta = std::pow(10.0, 3.0 * ul(gen));
        const double ls = lt_singular_street(s, lambda, 1.0, beta);
        const double ln = lt_nonsingular_street(s, lambda, 1.0, beta);
        EXPECT_GT(ls, 0.0);
        EXPECT_LE(ln, 1.0);
        EXPECT_GE(ln, ls);
        EXPECT_LT(lt_singular_street(1.5 * s, lambda, 1.0, beta), ls);
        EXPECT_LT(lt_nonsingular_street(1.5 * s, lambda, 1.0, beta), ln);
        const double ts = lt_singular_total(s, lambda, 1.0, 4.0, 70.0);
        const double tn = lt_nonsingular_total(s, lambda, 1.0, 4.0, 70.0);
        EXPECT_GE(tn, ts);
        EXPECT_LT(lt_nonsingular_total(1.5 * s, lambda, 1.0, 4.0, 70.0), tn);
    }
}

TEST(LaplaceProperties, CompletelyMonotoneAtLowOrders)
{
    // derivatives of exp(-E) from a jet: signs must alternate
    for (double s : {0.01, 0.5, 3.0, 80.0}) {
        const Jet x = Jet::variable(s, 4);
        const Jet ln = exp(-nonsingular_total_exponent(x, 0.1, 1.0, 4.0, 70.0));
        const Jet ls = exp(-singular_total_exponent(x, 0.1, 1.0, 4.0, 70.0));
        for (std::size_t i = 1; i <= 4; ++i) {
            const double sign = (i % 2 == 0) ? 1.0 : -1.0;
            EXPECT_GT(sign * ln.derivative(i), 0.0) << "s=" << s << " order " << i;
            EXPECT_GT(sign * ls.derivative(i), 0.0) << "s=" << s << " order " << i;
        }
        // and the plain second difference agrees in sign
        const double h = 1e-3 * s;
        auto f = [](double v) { return lt_nonsingular_total(v, 0.1, 1.0, 4.0, 70.0); };
        EXPECT_LT(f(s + h) - f(s - h), 0.0);
        EXPECT_GT(f(s + h) - 2.0 * f(s) + f(s - h), 0.0);
    }
}

TEST(LaplaceProperties, IntegrationRules)
{
    std::mt19937_64 gen(20);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        const double s = std::pow(10.0, u(gen));
        const double z = std::pow(10.0, u(gen));
        const double beta = std::pow(10.0, u(gen));
        const double c = std::sqrt(s * z / beta);
        const double from_zero = street_integral_oracle(s * z, beta, 0.0);
        EXPECT_NEAR(from_zero, kPi / 2.0 * c, 1e-8 * kPi / 2.0 * c);
        const double from_one = street_integral_oracle(s * z, beta, 1.0);
        EXPECT_NEAR(from_one, c * std::atan(c), 1e-8 * c * std::atan(c));
        // and the exponents are exactly 2 lambda times these integrals
        EXPECT_NEAR(singular_street_exponent(s, 0.05, z, beta), 0.1 * from_zero, 1e-8 * 0.1 * from_zero);
        EXPECT_NEAR(nonsingular_street_exponent(s, 0.05, z, beta), 0.1 * from_one, 1e-8 * 0.1 * from_one);
    }
}

TEST(LaplaceProperties, DerivativesAtOriginGiveMoments)
{
    const double lambda = 0.1;
    auto L = [&](double s) { return lt_nonsingular_total(s, lambda, 1.0, 4.0, 70.0); };
    // forward differences with Richardson extrapolation
    auto first = [&](double h) { return (-3.0 * L(0) + 4.0 * L(h) - L(2 * h)) / (2 * h); };
    auto second = [&](double h) { return (L(0) - 2.0 * L(h) + L(2 * h)) / (h * h); };
    const double h = 1e-4;
    const double d1 = (4.0 * first(h / 2) - first(h)) / 3.0;
    const double d2 = 2.0 * second(h / 2) - second(h);
    const InterferenceMoments mom = moments(lambda, 1.0, 4.0, 70.0);
    EXPECT_NEAR(-d1, mom.mean, 1e-3 * mom.mean);
    EXPECT_NEAR(d2, mom.second_moment, 1e-3 * mom.second_moment);
    EXPECT_NEAR(d2 - d1 * d1, mom.variance, 1e-3 * mom.variance);
}

TEST(LaplaceTotal, Errors)
{
    EXPECT_THROW(lt_singular_total(1.0, 0.1, 1.0, 2.0, 70.0), femtoint::domain_error);
    EXPECT_THROW(lt_nonsingular_total(1.0, 0.1, 1.0, 1.5, 70.0), femtoint::domain_error);
    // alpha barely above 2 at a minute rel_tol needs more than 1e6 streets
    EXPECT_THROW(nonsingular_total_exponent(1.0, 0.1, 1.0, 2.000001, 1.0, 1e-15), convergence_error);
}

TEST(LaplaceModel, SelectsVariantsAndSubsets)
{
    ScenarioConfig cfg;
    PathlossModel pl;
    const double z = cfg.composite_gain();
    const double s = 1e5;
    LaplaceModel m = LaplaceModel::infinite(cfg, pl);
    EXPECT_DOUBLE_EQ(m(s), lt_nonsingular_total(s, 0.1, z, 4.0, 70.0));
    pl.variant = PathlossVariant::Singular;
    m = LaplaceModel::infinite(cfg, pl);
    EXPECT_DOUBLE_EQ(m(s), lt_singular_total(s, 0.1, z, 4.0, 70.0));

    m.only_street = 2;
    EXPECT_DOUBLE_EQ(m(s), lt_singular_street(s, 0.1, z, std::pow(140.0, 4)));

    pl.include_horizontal = true;
    LaplaceModel both = LaplaceModel::infinite(cfg, pl);
    LaplaceModel one = both;
    one.include_horizontal = false;
    EXPECT_NEAR(both.exponent(s), 2.0 * one.exponent(s), 1e-15 * both.exponent(s));

    pl = {};
    LaplaceModel all = LaplaceModel::infinite(cfg, pl);
    LaplaceModel rest = all;
    rest.include_facing = false;
    EXPECT_NEAR(all.exponent(s) - rest.exponent(s), nonsingular_street_exponent(s, 0.1, z, 1.0),
                1e-12 * all.exponent(s));
    EXPECT_THROW(all.exponent(-1.0), femtoint::domain_error);
}

TEST(LaplaceModel, WindowApproachesInfiniteDomain)
{
    ScenarioConfig cfg;
    const PathlossModel pl;
    const double s = 3e5;
    const double inf = LaplaceModel::infinite(cfg, pl).exponent(s);
    double prev_gap = 1.0;
    for (double w : {2000.0, 20000.0, 200000.0}) {
        cfg.grid.window_side = w;
        const double win = LaplaceModel::windowed(cfg, pl).exponent(s);
        const double gap = (inf - win) / inf;
        EXPECT_GT(gap, 0.0);
        EXPECT_LT(gap, prev_gap);
        prev_gap = gap;
    }
    EXPECT_LT(prev_gap, 1e-3);
}
