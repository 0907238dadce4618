#pragma once

// Snapshot simulator: independent PPPs of active transmitters on each street
// of the window, Rayleigh (unit-mean exponential) interferer fading, and a
// Gamma(m, P_rx/m) wanted signal. Serves as the ground truth the closed forms
// are checked against.
//
// Truncation: streets k = 0..floor(W / 2D) of the W x W window, cars at
// |x1| <= W/2. Under NonSingular, cars with |x1| < 1 m are not drawn (the
// non-singular transform integrates from 1). Under Singular, cars with
// |x1| < singular_guard are dropped to keep the sum finite.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "femtoint/errors.hpp"
#include "femtoint/rng.hpp"
#include "femtoint/scenario.hpp"

namespace femtoint {

struct StreetSelection {
    bool include_facing = true;
    std::optional<int> only_street; // simulate a single street k
};

struct McOptions {
    StreetSelection streets;
    double singular_guard = 1e-6;           // [m]
    std::size_t max_snapshots = 50'000'000; // resource cap
    unsigned threads = 0;                   // 0: hardware concurrency
};

struct SnapshotSample {
    double interference = 0.0;                 // [mW]
    std::optional<double> wanted_power;        // [mW]
    std::int64_t car_count = 0;                // cars that contribute
};

inline constexpr std::uint32_t kInterferenceTag = 0;
inline constexpr std::uint32_t kWantedTag = 1;

/// One snapshot of the aggregate interference at the victim crossing.
inline SnapshotSample sample_snapshot(const ScenarioConfig& cfg, const PathlossModel& pl,
                                      SnapshotStream& rng, const McOptions& opts = {})
{
    SnapshotSample out;
    const double lambda = cfg.traffic.density;
    const double window = cfg.grid.window_side;
    const double half = window / 2.0;
    const double near = pl.variant == PathlossVariant::NonSingular ? 1.0 : opts.singular_guard;
    const double z = cfg.composite_gain();
    if (lambda == 0.0)
        return out;

    int first = opts.streets.include_facing ? 0 : 1;
    int last = cfg.grid.last_street_in_window();
    if (opts.streets.only_street) {
        first = *opts.streets.only_street;
        last = first;
    }
    boost::random::poisson_distribution<std::int64_t, double> count_dist(lambda * window);
    boost::random::exponential_distribution<double> fading(1.0); // ziggurat, no log per car
    const int families = pl.include_horizontal ? 2 : 1;

    double total = 0.0;
    for (int family = 0; family < families; ++family) {
        for (int k = first; k <= last; ++k) {
            const double gain = z / beta_k(cfg.grid, cfg.radio.pathloss_exponent, k);
            const std::int64_t n = count_dist(rng);
            double street = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                const double x = std::abs(window * (rng.uniform() - 0.5));
                if (x < near || x > half)
                    continue;
                street += fading(rng) / (x * x);
                ++out.car_count;
            }
            total += gain * street;
        }
    }
    out.interference = total;
    return out;
}

namespace detail {

inline unsigned resolve_threads(unsigned requested)
{
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n) on contiguous blocks, one per worker.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn)
{
    threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1)));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t block = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * block, hi = std::min(n, lo + block);
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i)
                fn(i);
        });
    }
    for (auto& th : pool)
        th.join();
}

inline void check_snapshot_count(std::size_t n, const McOptions& opts)
{
    if (n < 1)
        throw domain_error("Monte Carlo: need at least one snapshot");
    if (n > opts.max_snapshots)
        throw resource_error("Monte Carlo: " + std::to_string(n) + " snapshots exceed the cap of "
                             + std::to_string(opts.max_snapshots));
}

} // namespace detail

/// All snapshots, indexed by snapshot number. Snapshot i uses substream i of
/// `seed` (tag 0 for interference, tag 1 for the wanted signal), so the output
/// is identical for any thread count.
inline std::vector<SnapshotSample> run_snapshots(const ScenarioConfig& cfg, const PathlossModel& pl,
                                                 std::size_t n_snapshots, std::uint64_t seed,
                                                 bool draw_wanted, const McOptions& opts = {})
{
    cfg.validate();
    detail::check_snapshot_count(n_snapshots, opts);
    std::vector<SnapshotSample> out(n_snapshots);
    const int m = cfg.femto.nakagami_m;
    const double theta = cfg.femto.theta();
    detail::parallel_for(n_snapshots, opts.threads, [&](std::size_t i) {
        SnapshotStream rng(seed, i, kInterferenceTag);
        out[i] = sample_snapshot(cfg, pl, rng, opts);
        if (draw_wanted) {
            SnapshotStream wanted(seed, i, kWantedTag);
            std::gamma_distribution<double> power(m, theta);
            out[i].wanted_power = power(wanted);
        }
    });
    return out;
}

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

/// Empirical distribution of snapshot values. Keeps draw order (for batch
/// means) and a sorted copy (for order statistics).
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> samples)
        : samples_(std::move(samples)), sorted_(samples_)
    {
        if (samples_.empty())
            throw degenerate_error("EmpiricalDistribution: no samples");
        std::sort(sorted_.begin(), sorted_.end());
    }

    std::size_t size() const { return samples_.size(); }
    const std::vector<double>& samples() const { return samples_; }
    const std::vector<double>& sorted() const { return sorted_; }
    double min() const { return sorted_.front(); }
    double max() const { return sorted_.back(); }

    /// Lower order statistic: the ceil(q n)-th smallest sample.
    double quantile(double q) const
    {
        if (!(q > 0.0 && q < 1.0))
            throw domain_error("quantile: q must be in (0, 1)");
        return quantile_of(sorted_, q);
    }

    /// Fraction of samples <= x.
    double cdf(double x) const
    {
        const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
        return static_cast<double>(it - sorted_.begin()) / static_cast<double>(size());
    }

    double ccdf(double x) const { return 1.0 - cdf(x); }

    double mean() const { return mean_of([](double v) { return v; }).value; }

    double variance() const
    {
        const double mu = mean();
        double acc = 0.0;
        for (double v : samples_)
            acc += (v - mu) * (v - mu);
        return size() > 1 ? acc / static_cast<double>(size() - 1) : 0.0;
    }

    /// Sample variance with the large-n standard error sqrt((m4 - s^4) / n).
    Estimate variance_estimate() const
    {
        const double mu = mean();
        const double n = static_cast<double>(size());
        double m2 = 0.0, m4 = 0.0;
        for (double v : samples_) {
            const double d2 = (v - mu) * (v - mu);
            m2 += d2;
            m4 += d2 * d2;
        }
        const double var = size() > 1 ? m2 / (n - 1.0) : 0.0;
        m2 /= n;
        m4 /= n;
        const double se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
        return {var, se, var - 1.96 * se, var + 1.96 * se};
    }

    /// Mean of f(sample) with its i.i.d. standard error (snapshots are independent).
    template <class F>
    Estimate mean_of(F&& f) const
    {
        double mu = 0.0;
        for (double v : samples_)
            mu += f(v);
        mu /= static_cast<double>(size());
        double acc = 0.0;
        for (double v : samples_) {
            const double d = f(v) - mu;
            acc += d * d;
        }
        const double n = static_cast<double>(size());
        const double se = size() > 1 ? std::sqrt(acc / (n - 1.0) / n) : 0.0;
        return {mu, se, mu - 1.96 * se, mu + 1.96 * se};
    }

    /// Batch-means confidence interval for a statistic computed per batch of
    /// draw-ordered samples. stat receives a sorted batch.
    template <class Stat>
    Estimate batch_means(Stat&& stat, int batches = 20, double level = 0.95) const
    {
        if (size() < 100)
            throw degenerate_error("batch means: need at least 100 samples");
        if (batches < 20)
            throw domain_error("batch means: need at least 20 batches");
        const std::size_t per = size() / static_cast<std::size_t>(batches);
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(batches));
        std::vector<double> batch;
        for (int b = 0; b < batches; ++b) {
            batch.assign(samples_.begin() + static_cast<std::ptrdiff_t>(b * per),
                         samples_.begin() + static_cast<std::ptrdiff_t>((b + 1) * per));
            std::sort(batch.begin(), batch.end());
            values.push_back(stat(batch));
        }
        double mu = 0.0;
        for (double v : values)
            mu += v;
        mu /= batches;
        double acc = 0.0;
        for (double v : values)
            acc += (v - mu) * (v - mu);
        const double se = std::sqrt(acc / (batches - 1.0) / batches);
        const boost::math::students_t t(batches - 1.0);
        const double half = boost::math::quantile(t, 0.5 + level / 2.0) * se;
        return {mu, se, mu - half, mu + half};
    }

    Estimate mean_ci(int batches = 20) const
    {
        return batch_means(
            [](const std::vector<double>& b) {
                double s = 0.0;
                for (double v : b)
                    s += v;
                return s / static_cast<double>(b.size());
            },
            batches);
    }

    Estimate cdf_ci(double x, int batches = 20) const
    {
        return batch_means(
            [x](const std::vector<double>& b) {
                const auto it = std::upper_bound(b.begin(), b.end(), x);
                return static_cast<double>(it - b.begin()) / static_cast<double>(b.size());
            },
            batches);
    }

    Estimate ccdf_ci(double x, int batches = 20) const
    {
        Estimate e = cdf_ci(x, batches);
        return {1.0 - e.value, e.std_error, 1.0 - e.ci_hi, 1.0 - e.ci_lo};
    }

    Estimate quantile_ci(double q, int batches = 20) const
    {
        if (!(q > 0.0 && q < 1.0))
            throw domain_error("quantile: q must be in (0, 1)");
        return batch_means([q](const std::vector<double>& b) { return quantile_of(b, q); },
                           batches);
    }

private:
    static double quantile_of(const std::vector<double>& sorted, double q)
    {
        const auto n = static_cast<double>(sorted.size());
        auto idx = static_cast<std::size_t>(std::ceil(q * n));
        idx = std::clamp<std::size_t>(idx, 1, sorted.size());
        return sorted[idx - 1];
    }

    std::vector<double> samples_;
    std::vector<double> sorted_;
};

inline EmpiricalDistribution run_interference_mc(const ScenarioConfig& cfg, const PathlossModel& pl,
                                                 std::size_t n_snapshots, std::uint64_t seed,
                                                 const McOptions& opts = {})
{
    const auto snaps = run_snapshots(cfg, pl, n_snapshots, seed, false, opts);
    std::vector<double> values(snaps.size());
    std::transform(snaps.begin(), snaps.end(), values.begin(),
                   [](const SnapshotSample& s) { return s.interference; });
    return EmpiricalDistribution(std::move(values));
}

/// SIR = P_rx / I per snapshot; I = 0 gives +inf (never an outage).
inline double snapshot_sir(const SnapshotSample& s)
{
    if (s.interference == 0.0)
        return std::numeric_limits<double>::infinity();
    return *s.wanted_power / s.interference;
}

inline EmpiricalDistribution run_sir_mc(const ScenarioConfig& cfg, const PathlossModel& pl,
                                        std::size_t n_snapshots, std::uint64_t seed,
                                        const McOptions& opts = {})
{
    const auto snaps = run_snapshots(cfg, pl, n_snapshots, seed, true, opts);
    std::vector<double> values(snaps.size());
    std::transform(snaps.begin(), snaps.end(), values.begin(), snapshot_sir);
    return EmpiricalDistribution(std::move(values));
}

} // namespace femtoint
