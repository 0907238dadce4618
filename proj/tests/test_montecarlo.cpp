#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "femtoint/analytic.hpp"
#include "femtoint/laplace.hpp"
#include "femtoint/montecarlo.hpp"

using namespace femtoint;

namespace {

McOptions only_street(int k)
{
    McOptions o;
    o.streets.only_street = k;
    return o;
}

} // namespace

TEST(Snapshot, EmptyProcess)
{
    ScenarioConfig cfg;
    cfg.traffic.density = 0.0;
    SnapshotStream rng(1, 0);
    const SnapshotSample s = sample_snapshot(cfg, {}, rng);
    EXPECT_EQ(s.interference, 0.0);
    EXPECT_EQ(s.car_count, 0);
    const auto sir = run_sir_mc(cfg, {}, 200, 1);
    EXPECT_EQ(sir.cdf(1e12), 0.0); // every snapshot has infinite SIR
}

TEST(Snapshot, ZeroTransmitPowerGivesZeroInterference)
{
    ScenarioConfig cfg;
    cfg.radio.tx_power_mw = 0.0;
    const auto d = run_interference_mc(cfg, {}, 50, 3);
    EXPECT_EQ(d.max(), 0.0);
}

TEST(Snapshot, CarCountIsPoisson)
{
    ScenarioConfig cfg;
    const auto snaps = run_snapshots(cfg, {}, 2000, 17, false, only_street(3));
    double mean = 0.0;
    for (const auto& s : snaps)
        mean += static_cast<double>(s.car_count);
    mean /= static_cast<double>(snaps.size());
    // lambda W = 200 cars, minus the |x1| < 1 exclusion (1 / 1000 of the street)
    const double expect = 200.0 * (1.0 - 1.0 / 1000.0);
    EXPECT_NEAR(mean, expect, 5.0 * std::sqrt(expect / 2000.0));
}

TEST(Snapshot, DeterministicAcrossRunsAndThreads)
{
    ScenarioConfig cfg;
    cfg.femto.nakagami_m = 2;
    McOptions one, four;
    one.threads = 1;
    four.threads = 4;
    const auto a = run_snapshots(cfg, {}, 3000, 99, true, one);
    const auto b = run_snapshots(cfg, {}, 3000, 99, true, four);
    const auto c = run_snapshots(cfg, {}, 3000, 99, true, one);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a[i].interference, b[i].interference);
        ASSERT_EQ(*a[i].wanted_power, *b[i].wanted_power);
        ASSERT_EQ(a[i].car_count, b[i].car_count);
        ASSERT_EQ(a[i].interference, c[i].interference);
    }
    const auto other = run_snapshots(cfg, {}, 10, 100, false, one);
    EXPECT_NE(other[0].interference, a[0].interference);
}

TEST(Snapshot, FacingStreetMeanMatchesAnalytic)
{
    const ScenarioConfig cfg;
    const auto d = run_interference_mc(cfg, {}, 100000, 5, only_street(0));
    const double expect = 2.0 * cfg.traffic.density * cfg.composite_gain() * (1.0 - 1.0 / 1000.0);
    EXPECT_NEAR(d.mean(), expect, 0.02 * expect);
}

TEST(Snapshot, HorizontalStreetsDoubleTheMean)
{
    const ScenarioConfig cfg;
    PathlossModel both;
    both.include_horizontal = true;
    const auto v = run_interference_mc(cfg, {}, 15000, 8);
    const auto h = run_interference_mc(cfg, both, 15000, 9);
    const double se = std::hypot(v.mean_of([](double x) { return x; }).std_error,
                                 h.mean_of([](double x) { return x; }).std_error);
    EXPECT_NEAR(h.mean() - 2.0 * v.mean(), 0.0, 4.0 * 2.0 * se);
}

TEST(Snapshot, SingularStreetLaplaceTransform)
{
    const ScenarioConfig cfg;
    PathlossModel sg;
    sg.variant = PathlossVariant::Singular;
    const double z = cfg.composite_gain();
    const double s = 1.0 / z; // s z / beta_0 = 1
    const auto d = run_interference_mc(cfg, sg, 20000, 21, only_street(0));
    const Estimate e = d.mean_of([s](double x) { return std::exp(-s * x); });
    EXPECT_NEAR(e.value, 0.73040269104864560, 3.0 * e.std_error + 2e-4);
}

TEST(Snapshot, SingularGuardHalvingIsNegligible)
{
    const ScenarioConfig cfg;
    PathlossModel sg;
    sg.variant = PathlossVariant::Singular;
    McOptions half;
    half.singular_guard = 0.5e-6;
    const auto a = run_interference_mc(cfg, sg, 5000, 4);
    const auto b = run_interference_mc(cfg, sg, 5000, 4, half);
    for (double q : {0.1, 0.5, 0.9})
        EXPECT_NEAR(a.quantile(q), b.quantile(q), 1e-9 * a.quantile(q));
}

TEST(Snapshot, Errors)
{
    const ScenarioConfig cfg;
    McOptions capped;
    capped.max_snapshots = 100;
    EXPECT_THROW(run_interference_mc(cfg, {}, 101, 1, capped), resource_error);
    EXPECT_THROW(run_interference_mc(cfg, {}, 0, 1), femtoint::domain_error);
    ScenarioConfig bad;
    bad.radio.pathloss_exponent = 2.0;
    EXPECT_THROW(run_interference_mc(bad, {}, 10, 1), femtoint::domain_error);
}

TEST(Empirical, OrderStatistics)
{
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    std::shuffle(v.begin(), v.end(), std::mt19937(1));
    const EmpiricalDistribution d(v);
    EXPECT_EQ(d.quantile(0.5), 50.0);
    EXPECT_EQ(d.quantile(0.01), 1.0);
    EXPECT_EQ(d.quantile(0.999), 100.0);
    EXPECT_EQ(d.ccdf(d.min() - 1e-9), 1.0);
    EXPECT_EQ(d.ccdf(d.max()), 0.0);
    EXPECT_DOUBLE_EQ(d.cdf(37.0), 0.37);
    EXPECT_DOUBLE_EQ(d.mean(), 50.5);
    double prev = 1.0;
    for (double x = 0.0; x < 102.0; x += 0.5) {
        EXPECT_LE(d.ccdf(x), prev);
        prev = d.ccdf(x);
    }
    EXPECT_THROW(d.quantile(0.0), femtoint::domain_error);
    EXPECT_THROW(d.quantile(1.0), femtoint::domain_error);
}

TEST(Empirical, SinglePoint)
{
    const EmpiricalDistribution d({4.2});
    EXPECT_EQ(d.min(), d.max());
    EXPECT_EQ(d.quantile(0.5), 4.2);
    EXPECT_EQ(d.variance(), 0.0);
    EXPECT_THROW(d.mean_ci(), degenerate_error);
    EXPECT_THROW(EmpiricalDistribution({}), degenerate_error);
}

TEST(Empirical, BatchMeansRequirements)
{
    std::vector<double> v(99, 1.0);
    EXPECT_THROW(EmpiricalDistribution(v).mean_ci(), degenerate_error);
    v.push_back(2.0);
    const EmpiricalDistribution d(v);
    EXPECT_NO_THROW(d.mean_ci());
    EXPECT_THROW(d.mean_ci(10), femtoint::domain_error);
}

TEST(Empirical, ConfidenceIntervalShrinksLikeRootN)
{
    std::mt19937_64 gen(12);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> xs, ys;
    for (int n : {1000, 10000, 100000}) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (double& x : v)
            x = e(gen);
        const EmpiricalDistribution d(std::move(v));
        double width = 0.0;
        // average a few statistics so one noisy batch estimate does not dominate
        for (const Estimate& est : {d.mean_ci(), d.cdf_ci(1.0), d.quantile_ci(0.5)})
            width += std::log(est.ci_hi - est.ci_lo);
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(width / 3.0);
    }
    const double mx = (xs[0] + xs[1] + xs[2]) / 3.0, my = (ys[0] + ys[1] + ys[2]) / 3.0;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < 3; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    EXPECT_NEAR(sxy / sxx, -0.5, 0.1);
}

TEST(Empirical, CoverageOfKnownMean)
{
    // exponential(1): the 95% batch-means interval should cover 1 most of the time
    std::mt19937_64 gen(77);
    std::exponential_distribution<double> e(1.0);
    int covered = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> v(2000);
        for (double& x : v)
            x = e(gen);
        const Estimate m = EmpiricalDistribution(std::move(v)).mean_ci();
        covered += m.ci_lo <= 1.0 && 1.0 <= m.ci_hi;
    }
    EXPECT_GT(covered, 0.89 * reps);
    EXPECT_LT(covered, 0.995 * reps);
}

TEST(SirSimulation, LargeNakagamiConcentratesWantedPower)
{
    ScenarioConfig cfg;
    cfg.femto.nakagami_m = 50;
    const auto sir = run_sir_mc(cfg, {}, 20000, 31);
    const auto inter = run_interference_mc(cfg, {}, 20000, 31);
    // same substreams: interference draws coincide, only the wanted power differs
    for (double q : {0.1, 0.5, 0.9}) {
        const double det = cfg.femto.mean_rx_power_mw / inter.quantile(1.0 - q);
        EXPECT_NEAR(sir.quantile(q), det, 0.05 * det) << "q=" << q;
    }
}

TEST(SirSimulation, OutageMatchesDerivativeFormulaForRayleigh)
{
    ScenarioConfig cfg;
    cfg.traffic.density = 0.01;
    const auto sir = run_sir_mc(cfg, {}, 20000, 13);
    const double analytic = outage_probability(cfg.femto.sir_target, cfg.femto,
                                               LaplaceModel::windowed(cfg, {}));
    const Estimate mc = sir.cdf_ci(cfg.femto.sir_target);
    EXPECT_NEAR(mc.value, analytic, 4.0 * mc.std_error + 1e-3);
}
