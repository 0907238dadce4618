// femtoint-cli: closed-form interference statistics, the snapshot simulator,
// cross-validation and figure reproduction for the vehicular-to-femto-cell
// interference model.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_output.hpp"
#include "femtoint/analytic.hpp"
#include "femtoint/config.hpp"
#include "femtoint/laplace.hpp"
#include "femtoint/montecarlo.hpp"

using namespace femtoint;
namespace fc = femtoint::cli;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitValidation = 4;

struct Globals {
    std::string config;
    std::string out = "femtoint-out";
    std::uint64_t seed = 20240607;
    std::size_t snapshots = 100000;
    bool include_horizontal = false;
    std::string pathloss;
    unsigned threads = 0;
};

struct Context {
    Globals g;
    LoadedConfig cfg;

    const ScenarioConfig& sc() const { return cfg.scenario; }
    const PathlossModel& pl() const { return cfg.pathloss; }

    McOptions mc(std::optional<int> only_street = std::nullopt, bool facing = true) const
    {
        McOptions o;
        o.threads = g.threads;
        o.streets.only_street = only_street;
        o.streets.include_facing = facing;
        return o;
    }

    fc::RunRecorder recorder(const std::string& command) const
    {
        return fc::RunRecorder(g.out, command, to_config_text(cfg), g.seed, g.snapshots,
                               detail::resolve_threads(g.threads));
    }
};

Context make_context(const Globals& g)
{
    LoadedConfig cfg = g.config.empty() ? parse_config("") : load_config(g.config);
    if (g.include_horizontal)
        cfg.pathloss.include_horizontal = true;
    if (g.pathloss == "singular")
        cfg.pathloss.variant = PathlossVariant::Singular;
    else if (g.pathloss == "nonsingular")
        cfg.pathloss.variant = PathlossVariant::NonSingular;
    else if (!g.pathloss.empty())
        throw config_error(0, "--pathloss must be singular or nonsingular");
    if (g.snapshots < 1)
        throw config_error(0, "--snapshots must be >= 1");
    return {g, cfg};
}

void require_nonsingular(const Context& ctx, const std::string& what)
{
    if (ctx.pl().variant != PathlossVariant::NonSingular)
        throw config_error(0, what + ": the singular pathloss model has no finite moments; "
                                     "use --pathloss nonsingular");
}

void print_written(const fc::RunRecorder& rec, std::initializer_list<const char*> files)
{
    for (const char* f : files)
        std::printf("wrote %s\n", (rec.dir() / f).string().c_str());
}

// Seeds of the independent runs inside one command.
std::uint64_t run_seed(std::uint64_t seed, int run) { return seed + static_cast<std::uint64_t>(run); }

// --- moments / fit ----------------------------------------------------------

int cmd_moments(const Context& ctx)
{
    require_nonsingular(ctx, "moments");
    const InterferenceMoments inf = moments(ctx.sc(), ctx.pl());
    const InterferenceMoments win = window_moments(ctx.sc(), ctx.pl());
    fc::CsvTable t("moments.csv");
    t.row("mean_mw", inf.mean, win.mean, win.mean - inf.mean);
    t.row("variance_mw2", inf.variance, win.variance, win.variance - inf.variance);
    t.row("second_moment_mw2", inf.second_moment, win.second_moment,
          win.second_moment - inf.second_moment);
    auto rec = ctx.recorder("moments");
    rec.write(t);
    rec.finish();
    std::printf("E{I}   = %.6e mW   (window %.6e)\nVar{I} = %.6e mW^2 (window %.6e)\n", inf.mean,
                win.mean, inf.variance, win.variance);
    print_written(rec, {"moments.csv"});
    return 0;
}

int cmd_fit(const Context& ctx)
{
    require_nonsingular(ctx, "fit");
    const InterferenceMoments mom = moments(ctx.sc(), ctx.pl());
    const FittedDistribution ig = fit_inverse_gamma(mom);
    const FittedDistribution g = fit_gamma(mom);
    fc::CsvTable t("fit.csv");
    for (const auto& f : {ig, g})
        t.row(to_string(f.family), f.shape, f.scale, f.mean(), f.variance());
    auto rec = ctx.recorder("fit");
    rec.write(t);
    rec.finish();
    std::printf("inverse_gamma a=%.6f b=%.6e mW (%.3e W)\n", ig.shape, ig.scale, 1e-3 * ig.scale);
    std::printf("gamma         k=%.6f theta=%.6e mW\n", g.shape, g.scale);
    std::printf("b = E{I} (a - 1) with E{I} = %.6e mW; b is in mW and scales with z = P_t C = %.6e mW\n",
                mom.mean, ctx.sc().composite_gain());
    print_written(rec, {"fit.csv"});
    return 0;
}

// --- lt / outage / sir-cdf ----------------------------------------------------

int cmd_lt(const Context& ctx, const std::string& grid, int street)
{
    if (street < 0 || street > kMaxStreetTerms)
        throw config_error(0, "--street must be a non-negative street index");
    const std::vector<double> s_values = fc::parse_grid(grid, "--s-grid");
    PathlossModel sg = ctx.pl(), ns = ctx.pl();
    sg.variant = PathlossVariant::Singular;
    ns.variant = PathlossVariant::NonSingular;
    LaplaceModel sg_total = LaplaceModel::infinite(ctx.sc(), sg);
    LaplaceModel ns_total = LaplaceModel::infinite(ctx.sc(), ns);
    LaplaceModel sg_street = sg_total, ns_street = ns_total;
    sg_street.only_street = street;
    ns_street.only_street = street;
    fc::CsvTable t("lt.csv");
    for (double s : s_values) {
        if (!(s >= 0.0))
            throw config_error(0, "--s-grid values must be >= 0");
        t.row(s, sg_street(s), sg_total(s), ns_street(s), ns_total(s));
    }
    auto rec = ctx.recorder("lt");
    rec.write(t);
    rec.finish();
    print_written(rec, {"lt.csv"});
    return 0;
}

void check_positive(const std::vector<double>& v, const std::string& flag)
{
    for (double x : v)
        if (!(x > 0.0))
            throw config_error(0, flag + " values must be > 0");
}

int cmd_outage(const Context& ctx, const std::string& lambda_grid, const std::string& eta_list)
{
    const std::vector<double> lambdas =
        lambda_grid.empty() ? std::vector<double>{ctx.sc().traffic.density}
                            : fc::parse_grid(lambda_grid, "--lambda-grid");
    const std::vector<double> etas = eta_list.empty()
                                         ? std::vector<double>{ctx.sc().radio.isolation_db}
                                         : fc::parse_grid(eta_list, "--eta-list");
    check_positive(lambdas, "--lambda-grid");
    fc::CsvTable t("outage.csv");
    for (double eta : etas)
        for (double lambda : lambdas) {
            ScenarioConfig c = ctx.sc();
            c.traffic.density = lambda;
            c.radio.isolation_db = eta;
            const double gamma = c.femto.sir_target;
            const double inf = outage_probability(gamma, c.femto, LaplaceModel::infinite(c, ctx.pl()));
            const double win = outage_probability(gamma, c.femto, LaplaceModel::windowed(c, ctx.pl()));
            t.row(lambda, eta, c.femto.nakagami_m, linear_to_db(gamma), inf, win);
        }
    auto rec = ctx.recorder("outage");
    rec.write(t);
    rec.finish();
    print_written(rec, {"outage.csv"});
    return 0;
}

int cmd_sir_cdf(const Context& ctx, const std::string& gamma_grid)
{
    require_nonsingular(ctx, "sir-cdf");
    const std::vector<double> grid_db =
        fc::parse_grid(gamma_grid.empty() ? "lin:-20:40:121" : gamma_grid, "--gamma-grid");
    const FittedDistribution fit = fit_inverse_gamma(moments(ctx.sc(), ctx.pl()));
    const SirModelParams p = make_sir_params(ctx.sc().femto, fit);
    const LaplaceModel lt = LaplaceModel::infinite(ctx.sc(), ctx.pl());
    fc::CsvTable t("sir_cdf.csv");
    for (double g_db : grid_db) {
        const double g = db_to_linear(g_db);
        const SirCdfEvaluation e = sir_cdf_normalized_detail(p.normalize(g), p.m, p.a);
        t.row(g_db, g, p.normalize(g), e.value, e.path == SirCdfPath::Series ? "series" : "quadrature",
              outage_probability(g, ctx.sc().femto, lt));
    }
    auto rec = ctx.recorder("sir-cdf");
    rec.write(t);
    rec.finish();
    print_written(rec, {"sir_cdf.csv"});
    return 0;
}

// --- simulate -------------------------------------------------------------------

int cmd_simulate(const Context& ctx)
{
    auto rec = ctx.recorder("simulate");
    const auto snaps = run_snapshots(ctx.sc(), ctx.pl(), ctx.g.snapshots, ctx.g.seed, true, ctx.mc());
    fc::CsvTable t("simulate.csv");
    std::vector<double> inter, sir;
    inter.reserve(snaps.size());
    sir.reserve(snaps.size());
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        const double r = snapshot_sir(snaps[i]);
        t.row(i, snaps[i].interference, *snaps[i].wanted_power, linear_to_db(r), snaps[i].car_count);
        inter.push_back(snaps[i].interference);
        sir.push_back(r);
    }
    const EmpiricalDistribution di(std::move(inter)), ds(std::move(sir));
    fc::CsvTable s("simulate_summary.csv");
    auto put = [&s](const char* name, const Estimate& e) {
        s.row(name, e.value, e.std_error, e.ci_lo, e.ci_hi);
    };
    put("mean_mw", di.mean_of([](double v) { return v; }));
    put("variance_mw2", di.variance_estimate());
    if (di.size() >= 100) {
        put("median_mw", di.quantile_ci(0.5));
        put("outage", ds.cdf_ci(ctx.sc().femto.sir_target));
    } else {
        const double nan = std::nan("");
        s.row("median_mw", di.quantile(0.5), nan, nan, nan);
        s.row("outage", ds.cdf(ctx.sc().femto.sir_target), nan, nan, nan);
    }
    rec.write(t);
    rec.write(s);
    rec.finish();
    std::printf("%zu snapshots: mean I = %.6e mW, outage = %.4f\n", snaps.size(), di.mean(),
                ds.cdf(ctx.sc().femto.sir_target));
    print_written(rec, {"simulate.csv", "simulate_summary.csv"});
    return 0;
}

// --- validate -------------------------------------------------------------------

/// s values where the total singular exponent takes the given values; the
/// same s is used for the non-singular transform, which is smaller there.
std::vector<double> lt_check_points(const ScenarioConfig& sc, bool street_only)
{
    const double spread = street_only ? 1.0
                                      : 1.0 + specfun::riemann_zeta(sc.radio.pathloss_exponent / 2.0)
                                                  * std::pow(sc.grid.street_spacing(),
                                                             -sc.radio.pathloss_exponent / 2.0);
    std::vector<double> out;
    for (double e : {0.1, 0.3, 0.5, 0.7, 1.0}) {
        const double root = e / (std::numbers::pi * sc.traffic.density * spread);
        out.push_back(root * root / sc.composite_gain());
    }
    return out;
}

struct CheckTable {
    fc::CsvTable csv{"validate.csv"};
    int failed = 0;
    int total = 0;

    void add(const std::string& check, const std::string& param, double analytic, double infinite,
             double mc, double se, double tol)
    {
        const double dev = std::abs(analytic - mc);
        const bool ok = dev <= tol;
        ++total;
        if (!ok)
            ++failed;
        csv.row(check, param, analytic, infinite, mc, se, tol, dev, ok ? "pass" : "fail");
        std::printf("%-4s %-26s %-14s analytic=%-13.6g mc=%-13.6g dev=%-11.3g tol=%.3g\n",
                    ok ? "ok" : "FAIL", check.c_str(), param.c_str(), analytic, mc, dev, tol);
    }
};

int cmd_validate(const Context& ctx)
{
    const ScenarioConfig& sc = ctx.sc();
    if (!(sc.traffic.density > 0.0) || !(sc.composite_gain() > 0.0))
        throw config_error(0, "validate needs traffic.lambda > 0 and a positive transmit power");
    const std::size_t n = ctx.g.snapshots;
    const std::uint64_t seed = ctx.g.seed;
    auto rec = ctx.recorder("validate");
    PathlossModel ns = ctx.pl(), sg = ctx.pl();
    ns.variant = PathlossVariant::NonSingular;
    sg.variant = PathlossVariant::Singular;
    CheckTable checks;

    // identity of the fit
    const InterferenceMoments inf = moments(sc, ns);
    const InterferenceMoments win = window_moments(sc, ns);
    const FittedDistribution fit = fit_inverse_gamma(inf);
    checks.add("fit_scale_identity", "b", inf.mean * (fit.shape - 1.0), inf.mean * (fit.shape - 1.0),
               fit.scale, 0.0, 1e-12 * fit.scale);

    // moments and outage from the full non-singular run
    const auto full = run_snapshots(sc, ns, n, run_seed(seed, 0), true, ctx.mc());
    std::vector<double> inter(full.size()), sir(full.size());
    for (std::size_t i = 0; i < full.size(); ++i) {
        inter[i] = full[i].interference;
        sir[i] = snapshot_sir(full[i]);
    }
    const EmpiricalDistribution di(inter), ds(sir);
    const Estimate mean = di.mean_of([](double v) { return v; });
    const Estimate var = di.variance_estimate();
    checks.add("moment_mean", "mean_mw", win.mean, inf.mean, mean.value, mean.std_error,
               std::max(0.02 * win.mean, 3.0 * mean.std_error));
    checks.add("moment_variance", "variance_mw2", win.variance, inf.variance, var.value, var.std_error,
               std::max(0.02 * win.variance, 3.0 * var.std_error));
    {
        const double g = sc.femto.sir_target;
        const double a_win = outage_probability(g, sc.femto, LaplaceModel::windowed(sc, ns));
        const double a_inf = outage_probability(g, sc.femto, LaplaceModel::infinite(sc, ns));
        const double p = ds.cdf(g);
        checks.add("outage", "sir_target", a_win, a_inf, p,
                   std::sqrt(p * (1.0 - p) / static_cast<double>(n)), 0.01);
    }

    // the four transforms
    auto lt_checks = [&](const std::string& name, const PathlossModel& pl, bool street_only,
                         const EmpiricalDistribution* reuse, int run) {
        std::optional<EmpiricalDistribution> own;
        if (!reuse) {
            own.emplace(run_interference_mc(sc, pl, n, run_seed(seed, run),
                                            ctx.mc(street_only ? std::optional<int>(0) : std::nullopt)));
            reuse = &*own;
        }
        LaplaceModel w = LaplaceModel::windowed(sc, pl);
        LaplaceModel f = LaplaceModel::infinite(sc, pl);
        if (street_only) {
            w.only_street = 0;
            f.only_street = 0;
        }
        for (double s : lt_check_points(sc, street_only)) {
            const Estimate e = reuse->mean_of([s](double v) { return std::exp(-s * v); });
            checks.add(name, "s=" + fc::num(s), w(s), f(s), e.value, e.std_error,
                       3.0 * e.std_error + 1e-12);
        }
    };
    lt_checks("lt_nonsingular_total", ns, false, &di, 0);
    lt_checks("lt_nonsingular_street", ns, true, nullptr, 1);
    lt_checks("lt_singular_total", sg, false, nullptr, 2);
    lt_checks("lt_singular_street", sg, true, nullptr, 3);

    // horizontal streets: twice the vertical exponent
    if (!ns.include_horizontal) {
        PathlossModel both = ns;
        both.include_horizontal = true;
        const auto dh = run_interference_mc(sc, both, n, run_seed(seed, 4), ctx.mc());
        const double s = lt_check_points(sc, false)[2];
        const LaplaceModel vert = LaplaceModel::windowed(sc, ns);
        const LaplaceModel vert_inf = LaplaceModel::infinite(sc, ns);
        const Estimate e = dh.mean_of([s](double v) { return std::exp(-s * v); });
        checks.add("horizontal_doubling", "s=" + fc::num(s), std::exp(-2.0 * vert.exponent(s)),
                   std::exp(-2.0 * vert_inf.exponent(s)), e.value, e.std_error, 3.0 * e.std_error);
    }

    // removing the facing street
    {
        const auto rest = run_interference_mc(sc, ns, n, run_seed(seed, 5), ctx.mc(std::nullopt, false));
        const Estimate mr = rest.mean_of([](double v) { return v; });
        const InterferenceMoments win_rest = window_moments(sc, ns, false);
        const double delta_mc = linear_to_db(mean.value / mr.value);
        const double se_db = 10.0 / std::numbers::ln10
                             * std::hypot(mean.std_error / mean.value, mr.std_error / mr.value);
        checks.add("facing_street_delta_db", "mean ratio", linear_to_db(win.mean / win_rest.mean),
                   mean_delta_excluding_facing_street(sc.traffic.density, sc.composite_gain(),
                                                      sc.radio.pathloss_exponent, sc.grid.street_spacing()),
                   delta_mc, se_db, 3.0 * se_db);
    }

    rec.write(checks.csv);
    rec.finish();
    std::printf("%d of %d checks passed\n", checks.total - checks.failed, checks.total);
    print_written(rec, {"validate.csv"});
    return checks.failed == 0 ? 0 : kExitValidation;
}

// --- reproduce ------------------------------------------------------------------

int reproduce_fig1(const Context& ctx)
{
    require_nonsingular(ctx, "reproduce fig1");
    auto rec = ctx.recorder("reproduce fig1");
    const ScenarioConfig& sc = ctx.sc();
    const std::size_t n = ctx.g.snapshots;
    const auto all = run_interference_mc(sc, ctx.pl(), n, run_seed(ctx.g.seed, 0), ctx.mc());
    const auto rest =
        run_interference_mc(sc, ctx.pl(), n, run_seed(ctx.g.seed, 1), ctx.mc(std::nullopt, false));
    const InterferenceMoments m_all = moments(sc, ctx.pl());
    const InterferenceMoments m_rest = moments(sc, ctx.pl(), false);
    const FittedDistribution ig_all = fit_inverse_gamma(m_all), g_all = fit_gamma(m_all);
    const FittedDistribution ig_rest = fit_inverse_gamma(m_rest), g_rest = fit_gamma(m_rest);

    auto positive_quantile = [](const EmpiricalDistribution& d, double q) {
        const double v = d.quantile(q);
        return v > 0.0 ? v : d.max();
    };
    const double lo = std::floor(mw_to_dbm(positive_quantile(rest, 0.001)));
    const double hi = std::ceil(mw_to_dbm(std::max(all.max(), positive_quantile(all, 0.5))));
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw config_error(0, "reproduce fig1: interference is zero in every snapshot");
    fc::CsvTable t("fig1.csv");
    for (double dbm = lo; dbm <= hi; dbm += 1.0) {
        const double x = dbm_to_mw(dbm);
        t.row(dbm, x, all.ccdf(x), ig_all.ccdf(x), g_all.ccdf(x), rest.ccdf(x), ig_rest.ccdf(x),
              g_rest.ccdf(x));
    }

    fc::CsvTable s("fig1_summary.csv");
    const double q99 = all.quantile(0.99);
    s.row("mean_mc", all.mean(), "mW");
    s.row("mean_mc_no_facing", rest.mean(), "mW");
    s.row("mean_delta_mc", linear_to_db(all.mean() / rest.mean()), "dB");
    s.row("mean_delta_analytic", mean_delta_excluding_facing_street(sc.traffic.density,
              sc.composite_gain(), sc.radio.pathloss_exponent, sc.grid.street_spacing()), "dB");
    s.row("mean_delta_analytic_window",
          linear_to_db(window_moments(sc, ctx.pl()).mean / window_moments(sc, ctx.pl(), false).mean), "dB");
    s.row("fit_shape", ig_all.shape, "1");
    s.row("fit_scale", ig_all.scale, "mW");
    s.row("fit_shape_no_facing", ig_rest.shape, "1");
    s.row("p99_interference_mc", q99, "mW");
    s.row("p99_log10_ccdf_gap_inverse_gamma", std::abs(std::log10(ig_all.ccdf(q99)) - std::log10(0.01)),
          "decades");

    rec.write(t);
    rec.write(s);
    rec.write_script("fig1.gp",
                     "set datafile separator ','\n"
                     "set terminal pngcairo size 900,600\nset output 'fig1.png'\n"
                     "set logscale y\nset yrange [1e-4:1]\nset key bottom left\n"
                     "set xlabel 'x [dBm]'\nset ylabel 'P(I > x)'\n"
                     "plot 'fig1.csv' u 1:3 w p pt 7 ps 0.5 t 'simulation', \\\n"
                     "     '' u 1:4 w l t 'inverse Gamma', '' u 1:5 w l dt 2 t 'Gamma', \\\n"
                     "     '' u 1:6 w p pt 6 ps 0.5 t 'simulation, no k=0', \\\n"
                     "     '' u 1:7 w l t 'inverse Gamma, no k=0', '' u 1:8 w l dt 2 t 'Gamma, no k=0'\n");
    rec.finish();
    std::printf("mean interference drop without the facing street: %.2f dB (simulated), %.2f dB (closed form)\n",
                linear_to_db(all.mean() / rest.mean()),
                mean_delta_excluding_facing_street(sc.traffic.density, sc.composite_gain(),
                                                   sc.radio.pathloss_exponent, sc.grid.street_spacing()));
    print_written(rec, {"fig1.csv", "fig1_summary.csv", "fig1.gp"});
    return 0;
}

int reproduce_fig2(const Context& ctx, const std::string& lambda_grid, const std::string& eta_list)
{
    const std::vector<double> lambdas =
        fc::parse_grid(lambda_grid.empty() ? "log:1e-3:1e-1:9" : lambda_grid, "--lambda-grid");
    const std::vector<double> etas = fc::parse_grid(eta_list.empty() ? "0,10,20,30" : eta_list, "--eta-list");
    check_positive(lambdas, "--lambda-grid");
    auto rec = ctx.recorder("reproduce fig2");
    fc::CsvTable t("fig2.csv"), tr("fig2_truncation.csv");
    int run = 0;
    for (double lambda : lambdas) {
        ScenarioConfig base = ctx.sc();
        base.traffic.density = lambda;
        base.radio.isolation_db = 0.0;
        // interference is linear in z, so SIR at isolation eta is SIR_0 * 10^(eta/10)
        const auto sir0 = run_sir_mc(base, ctx.pl(), ctx.g.snapshots, run_seed(ctx.g.seed, run++), ctx.mc());
        for (double eta : etas) {
            ScenarioConfig c = base;
            c.radio.isolation_db = eta;
            const double g = c.femto.sir_target;
            const double win = outage_probability(g, c.femto, LaplaceModel::windowed(c, ctx.pl()));
            const double inf = outage_probability(g, c.femto, LaplaceModel::infinite(c, ctx.pl()));
            const double threshold = g / db_to_linear(eta);
            double p = sir0.cdf(threshold), lo = p, hi = p;
            if (sir0.size() >= 100) {
                const Estimate e = sir0.cdf_ci(threshold);
                lo = std::max(0.0, e.ci_lo);
                hi = std::min(1.0, e.ci_hi);
            }
            t.row(lambda, eta, win, p, lo, hi);
            tr.row(lambda, eta, inf, win, win - inf);
        }
    }
    rec.write(t);
    rec.write(tr);
    rec.write_script("fig2.gp",
                     "set datafile separator ','\n"
                     "set terminal pngcairo size 900,600\nset output 'fig2.png'\n"
                     "set logscale x\nset key top left\nset xlabel 'lambda [cars/m]'\n"
                     "set ylabel 'outage probability'\n"
                     "plot for [e in '0 10 20 30'] 'fig2.csv' u ($2==e?$1:1/0):3 w l t 'analytic, eta='.e.' dB', \\\n"
                     "     for [e in '0 10 20 30'] '' u ($2==e?$1:1/0):4:5:6 w yerrorbars pt 7 ps 0.6 t 'simulation, eta='.e.' dB'\n");
    rec.finish();
    print_written(rec, {"fig2.csv", "fig2_truncation.csv", "fig2.gp"});
    return 0;
}

int reproduce_fig3(const Context& ctx, const std::string& eta_list)
{
    require_nonsingular(ctx, "reproduce fig3");
    auto rec = ctx.recorder("reproduce fig3");
    const std::vector<double> etas = fc::parse_grid(eta_list.empty() ? "0,20" : eta_list, "--eta-list");
    ScenarioConfig base = ctx.sc();
    base.radio.isolation_db = 0.0;
    const auto sir0 = run_sir_mc(base, ctx.pl(), ctx.g.snapshots, ctx.g.seed, ctx.mc());

    fc::CsvTable t("fig3.csv"), s("fig3_summary.csv");
    for (double eta : etas) {
        ScenarioConfig c = base;
        c.radio.isolation_db = eta;
        const double shift = db_to_linear(eta);
        const FittedDistribution fit = fit_inverse_gamma(moments(c, ctx.pl()));
        const SirModelParams p = make_sir_params(c.femto, fit);
        const LaplaceModel lt = LaplaceModel::windowed(c, ctx.pl());
        const Estimate mean_db = sir0.mean_of([shift](double v) { return linear_to_db(v * shift); });
        if (!std::isfinite(mean_db.value))
            throw config_error(0, "reproduce fig3: snapshots without interference; raise traffic.lambda");
        const double lo = std::floor(2.0 * linear_to_db(sir0.quantile(0.001) * shift)) / 2.0;
        const double hi = std::ceil(2.0 * linear_to_db(sir0.quantile(0.999) * shift)) / 2.0;
        double max_diff = 0.0;
        for (double db = lo; db <= hi + 1e-9; db += 0.5) {
            const double g = db_to_linear(db);
            const double emp = sir0.cdf(g / shift);
            const double model = sir_cdf(g, p);
            if (emp <= 0.2)
                max_diff = std::max(max_diff, std::abs(model - emp));
            t.row(eta, db, emp, model, outage_probability(g, c.femto, lt));
        }
        const double model_db = sir_model_mean_db(p);
        s.row(eta, mean_db.value, model_db, mean_db.value - model_db, max_diff, fit.shape, fit.scale);
        std::printf("eta=%g dB: mean SIR %.2f dB simulated, %.2f dB model, gap %.2f dB\n", eta,
                    mean_db.value, model_db, mean_db.value - model_db);
    }
    rec.write(t);
    rec.write(s);
    rec.write_script("fig3.gp",
                     "set datafile separator ','\n"
                     "set terminal pngcairo size 900,600\nset output 'fig3.png'\n"
                     "set key top left\nset xlabel 'SIR [dB]'\nset ylabel 'P(SIR <= x)'\n"
                     "plot for [e in '0 20'] 'fig3.csv' u ($1==e?$2:1/0):3 w p pt 7 ps 0.5 t 'simulation, eta='.e.' dB', \\\n"
                     "     for [e in '0 20'] '' u ($1==e?$2:1/0):4 w l t 'inverse-Gamma model, eta='.e.' dB', \\\n"
                     "     for [e in '0 20'] '' u ($1==e?$2:1/0):5 w l dt 2 t 'exact, eta='.e.' dB'\n");
    rec.finish();
    print_written(rec, {"fig3.csv", "fig3_summary.csv", "fig3.gp"});
    return 0;
}

int run_guarded(const std::function<int()>& body)
{
    try {
        return body();
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const femtoint::domain_error& e) {
        std::fprintf(stderr, "invalid parameter: %s\n", e.what());
        return kExitConfig;
    } catch (const resource_error& e) {
        std::fprintf(stderr, "resource limit: %s\n", e.what());
        return kExitConfig;
    } catch (const degenerate_error& e) {
        std::fprintf(stderr, "degenerate input: %s\n", e.what());
        return kExitConfig;
    } catch (const convergence_error& e) {
        std::fprintf(stderr, "no convergence: %s\n", e.what());
        return kExitNumerical;
    } catch (const numerical_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Interference from vehicular transmitters at an indoor femto-cell on a Manhattan "
                 "grid: closed forms, snapshot simulation, and figure reproduction."};
    app.footer(fc::help_footer());
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "scenario file (section.key=value lines); defaults if omitted");
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "base seed of the random streams")->capture_default_str();
    app.add_option("--snapshots", g.snapshots, "snapshots per simulation run")->capture_default_str();
    app.add_flag("--include-horizontal", g.include_horizontal,
                 "add the horizontal streets (doubles the LT exponent)");
    app.add_option("--pathloss", g.pathloss, "override model.pathloss")
        ->check(CLI::IsMember({"singular", "nonsingular"}));
    app.add_option("--threads", g.threads, "worker threads for simulation (0: all cores)")
        ->capture_default_str();

    auto* moments_cmd = app.add_subcommand("moments", "mean and variance of the interference");
    auto* fit_cmd = app.add_subcommand("fit", "moment-matched inverse-Gamma and Gamma fits");

    auto* lt_cmd = app.add_subcommand("lt", "Laplace transforms of the interference");
    std::string s_grid = "log:1e3:1e9:13";
    int street = 0;
    lt_cmd->add_option("--s-grid", s_grid, "s values (v1,v2,... | log:lo:hi:n | lin:lo:hi:n)")
        ->capture_default_str();
    lt_cmd->add_option("--street", street, "street index k for the per-street columns")
        ->capture_default_str();

    auto* outage_cmd = app.add_subcommand("outage", "outage probability from transform derivatives");
    std::string lambda_grid, eta_list;
    outage_cmd->add_option("--lambda-grid", lambda_grid, "densities [1/m]; default: the config value");
    outage_cmd->add_option("--eta-list", eta_list, "car isolations [dB]; default: the config value");

    auto* sir_cmd = app.add_subcommand("sir-cdf", "SIR CDF under the inverse-Gamma interference model");
    std::string gamma_grid;
    sir_cmd->add_option("--gamma-grid", gamma_grid, "SIR thresholds [dB]; default lin:-20:40:121");

    auto* sim_cmd = app.add_subcommand("simulate", "run the snapshot simulator");
    auto* validate_cmd = app.add_subcommand(
        "validate", "cross-check closed forms against simulation; exit 4 on any breach. Moment "
                    "checks allow max(2%, 3 standard errors), transform checks 3 standard errors, "
                    "outage 0.01 absolute.");

    auto* repro_cmd = app.add_subcommand("reproduce", "regenerate a figure's data and plot script");
    std::string figure;
    repro_cmd->add_option("figure", figure, "fig1 | fig2 | fig3")
        ->required()
        ->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
    std::string repro_lambda, repro_eta;
    repro_cmd->add_option("--lambda-grid", repro_lambda, "fig2 densities; default log:1e-3:1e-1:9");
    repro_cmd->add_option("--eta-list", repro_eta, "isolations [dB]; default 0,10,20,30 (fig2), 0,20 (fig3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    return run_guarded([&]() -> int {
        const Context ctx = make_context(g);
        if (*moments_cmd)
            return cmd_moments(ctx);
        if (*fit_cmd)
            return cmd_fit(ctx);
        if (*lt_cmd)
            return cmd_lt(ctx, s_grid, street);
        if (*outage_cmd)
            return cmd_outage(ctx, lambda_grid, eta_list);
        if (*sir_cmd)
            return cmd_sir_cdf(ctx, gamma_grid);
        if (*sim_cmd)
            return cmd_simulate(ctx);
        if (*validate_cmd)
            return cmd_validate(ctx);
        if (figure == "fig1")
            return reproduce_fig1(ctx);
        if (figure == "fig2")
            return reproduce_fig2(ctx, repro_lambda, repro_eta);
        return reproduce_fig3(ctx, repro_eta);
    });
}
