#pragma once

// Output plumbing for femtoint-cli: documented CSV tables, checksums, and the
// run manifest. Every CSV the tool writes is declared in output_catalog(), so
// --help, the manifest and the files themselves share one column list.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "femtoint/errors.hpp"

namespace femtoint::cli {

inline constexpr const char* kToolVersion = "1.0.0";

struct ColumnDoc {
    std::string name;
    std::string description;
};

struct OutputDoc {
    std::string file;
    std::string command;
    std::vector<ColumnDoc> columns;
};

inline const std::vector<OutputDoc>& output_catalog()
{
    static const std::vector<OutputDoc> catalog = {
        {"moments.csv", "moments",
         {{"statistic", "mean_mw, variance_mw2 or second_moment_mw2"},
          {"infinite", "closed form over all streets and |x1| >= 1"},
          {"window", "same sums restricted to the simulated window"},
          {"truncation_correction", "window - infinite"}}},
        {"fit.csv", "fit",
         {{"family", "inverse_gamma or gamma"},
          {"shape", "a (inverse Gamma) or k (Gamma)"},
          {"scale_mw", "b (inverse Gamma) or theta (Gamma) in mW"},
          {"mean_mw", "mean of the fitted law (equals E{I})"},
          {"variance_mw2", "variance of the fitted law (equals Var{I})"}}},
        {"lt.csv", "lt",
         {{"s", "transform argument [1/mW]"},
          {"lt_singular_street", "singular pathloss, street --street only"},
          {"lt_singular_total", "singular pathloss, all vertical streets"},
          {"lt_nonsingular_street", "non-singular pathloss, street --street only"},
          {"lt_nonsingular_total", "non-singular pathloss, all vertical streets"}}},
        {"outage.csv", "outage",
         {{"lambda", "transmitter density [1/m]"},
          {"eta_db", "car isolation [dB]"},
          {"m", "Nakagami parameter of the wanted link"},
          {"sir_target_db", "SIR target [dB]"},
          {"outage_infinite", "outage from the infinite-domain transform"},
          {"outage_window", "outage from the transform restricted to the simulated window"}}},
        {"sir_cdf.csv", "sir-cdf",
         {{"sir_db", "SIR threshold [dB]"},
          {"sir_linear", "SIR threshold, linear"},
          {"gamma_n", "normalized SIR (b/theta) * SIR"},
          {"cdf_model", "SIR CDF with inverse-Gamma interference"},
          {"evaluation", "series or quadrature (path used for cdf_model)"},
          {"cdf_exact", "exact P(SIR <= threshold) from transform derivatives"}}},
        {"simulate.csv", "simulate",
         {{"snapshot", "snapshot index (substream number)"},
          {"interference_mw", "aggregate interference [mW]"},
          {"wanted_mw", "wanted signal power [mW]"},
          {"sir_db", "10 log10(wanted / interference); inf when no interferer"},
          {"cars", "transmitters that contributed"}}},
        {"simulate_summary.csv", "simulate",
         {{"statistic", "mean_mw, variance_mw2, median_mw or outage"},
          {"value", "estimate"},
          {"std_error", "standard error (batch means for median and outage)"},
          {"ci_lo", "lower end of the 95% interval"},
          {"ci_hi", "upper end of the 95% interval"}}},
        {"validate.csv", "validate",
         {{"check", "name of the cross-check"},
          {"parameter", "s value, or the statistic being compared"},
          {"analytic", "reference value for what the simulator draws"},
          {"analytic_infinite", "closed form without window truncation"},
          {"monte_carlo", "simulation estimate"},
          {"std_error", "standard error of the estimate"},
          {"tolerance", "allowed |analytic - monte_carlo|"},
          {"deviation", "|analytic - monte_carlo|"},
          {"status", "pass or fail"}}},
        {"fig1.csv", "reproduce fig1",
         {{"interference_dbm", "threshold x [dBm]"},
          {"interference_mw", "threshold x [mW]"},
          {"ccdf_empirical", "simulated P(I > x), all streets"},
          {"ccdf_inverse_gamma", "inverse-Gamma fit, all streets"},
          {"ccdf_gamma", "Gamma fit, all streets"},
          {"ccdf_empirical_no_facing", "simulated P(I > x) without the k=0 street"},
          {"ccdf_inverse_gamma_no_facing", "inverse-Gamma fit without the k=0 street"},
          {"ccdf_gamma_no_facing", "Gamma fit without the k=0 street"}}},
        {"fig1_summary.csv", "reproduce fig1",
         {{"quantity", "name"}, {"value", "value"}, {"unit", "unit"}}},
        {"fig2.csv", "reproduce fig2",
         {{"lambda", "transmitter density [1/m]"},
          {"eta_db", "car isolation [dB]"},
          {"outage_analytic", "outage from transform derivatives, window-matched"},
          {"outage_mc", "simulated outage"},
          {"ci_lo", "lower end of the 95% batch-means interval"},
          {"ci_hi", "upper end of the 95% batch-means interval"}}},
        {"fig2_truncation.csv", "reproduce fig2",
         {{"lambda", "transmitter density [1/m]"},
          {"eta_db", "car isolation [dB]"},
          {"outage_infinite", "outage from the infinite-domain transform"},
          {"outage_window", "outage from the window-matched transform (fig2 outage_analytic)"},
          {"truncation_correction", "outage_window - outage_infinite"}}},
        {"fig3.csv", "reproduce fig3",
         {{"eta_db", "car isolation [dB]"},
          {"sir_db", "SIR threshold [dB]"},
          {"cdf_empirical", "simulated P(SIR <= threshold)"},
          {"cdf_model", "SIR CDF with inverse-Gamma interference"},
          {"cdf_exact", "exact P(SIR <= threshold) from transform derivatives, window-matched"}}},
        {"fig3_summary.csv", "reproduce fig3",
         {{"eta_db", "car isolation [dB]"},
          {"mean_sir_db_mc", "simulated E[10 log10 SIR]"},
          {"mean_sir_db_model", "E[10 log10 SIR] under the inverse-Gamma model"},
          {"gap_db", "mean_sir_db_mc - mean_sir_db_model"},
          {"max_abs_cdf_diff_lower_tail", "max |cdf_model - cdf_empirical| where cdf_empirical <= 0.2"},
          {"fit_shape", "inverse-Gamma shape a"},
          {"fit_scale_mw", "inverse-Gamma scale b [mW]"}}},
    };
    return catalog;
}

inline const OutputDoc& output_doc(const std::string& file)
{
    for (const auto& d : output_catalog())
        if (d.file == file)
            return d;
    throw std::logic_error("undocumented output file " + file);
}

inline std::string help_footer()
{
    std::ostringstream os;
    os << "Output files (CSV, one header row) and their columns:\n";
    for (const auto& d : output_catalog()) {
        os << "\n  " << d.file << "  [" << d.command << "]\n";
        for (const auto& c : d.columns)
            os << "    " << c.name << ": " << c.description << '\n';
    }
    os << "\nEvery run also writes resolved.cfg, manifest.json (checksums, seed, wall clock)\n"
          "and, for reproduce, a gnuplot script.\n"
          "Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence,\n"
          "4 validation failure.\n";
    return os.str();
}

/// Fixed-format number for CSV cells: identical bytes for identical doubles.
inline std::string num(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}


class CsvTable {
public:
    explicit CsvTable(const std::string& file) : doc_(output_doc(file)) {}

    template <class... Cells>
    void row(const Cells&... cells)
    {
        static_assert(sizeof...(Cells) > 0);
        std::vector<std::string> r{cell(cells)...};
        if (r.size() != doc_.columns.size())
            throw std::logic_error(doc_.file + ": row width does not match the documented columns");
        rows_.push_back(std::move(r));
    }

    const OutputDoc& doc() const { return doc_; }

    std::string text() const
    {
        std::string out;
        for (std::size_t i = 0; i < doc_.columns.size(); ++i)
            out += (i ? "," : "") + doc_.columns[i].name;
        out += '\n';
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i)
                out += (i ? "," : "") + r[i];
            out += '\n';
        }
        return out;
    }

private:
    template <class T>
    static std::string cell(const T& v)
    {
        if constexpr (std::is_floating_point_v<T>)
            return num(static_cast<double>(v));
        else if constexpr (std::is_integral_v<T>)
            return std::to_string(v);
        else
            return std::string(v);
    }

    const OutputDoc& doc_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::uint64_t fnv1a64(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Collects written files and emits manifest.json at the end of a run.
class RunRecorder {
public:
    RunRecorder(std::filesystem::path out_dir, std::string command, std::string config_text,
                std::uint64_t seed, std::size_t snapshots, unsigned threads)
        : dir_(std::move(out_dir)), command_(std::move(command)), config_(std::move(config_text)),
          seed_(seed), snapshots_(snapshots), threads_(threads),
          start_(std::chrono::steady_clock::now()), started_utc_(utc_now())
    {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec)
            throw config_error(0, "cannot create output directory '" + dir_.string() + "'");
        write_file("resolved.cfg", config_);
    }

    void write(const CsvTable& table)
    {
        const std::string text = table.text();
        write_file(table.doc().file, text);
        nlohmann::ordered_json cols = nlohmann::ordered_json::array();
        for (const auto& c : table.doc().columns)
            cols.push_back({{"name", c.name}, {"description", c.description}});
        outputs_.push_back({{"file", table.doc().file},
                            {"fnv1a64", hex64(fnv1a64(text))},
                            {"bytes", text.size()},
                            {"columns", cols}});
    }

    void write_script(const std::string& file, const std::string& text)
    {
        write_file(file, text);
        scripts_.push_back({{"file", file}, {"fnv1a64", hex64(fnv1a64(text))}});
    }

    void finish() const
    {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        nlohmann::ordered_json m;
        m["tool"] = "femtoint-cli";
        m["version"] = kToolVersion;
        m["command"] = command_;
        m["seed"] = seed_;
        m["snapshots"] = snapshots_;
        m["threads"] = threads_;
        m["config"] = config_;
        m["config_file"] = "resolved.cfg";
        m["outputs"] = outputs_;
        m["scripts"] = scripts_;
        m["started_utc"] = started_utc_;
        m["wall_clock_seconds"] = wall;
        std::ofstream f(dir_ / "manifest.json", std::ios::binary);
        f << m.dump(2) << '\n';
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    void write_file(const std::string& name, const std::string& text) const
    {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f)
            throw config_error(0, "cannot write '" + (dir_ / name).string() + "'");
        f << text;
    }

    static std::string utc_now()
    {
        const std::time_t t = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    std::filesystem::path dir_;
    std::string command_;
    std::string config_;
    std::uint64_t seed_;
    std::size_t snapshots_;
    unsigned threads_;
    std::chrono::steady_clock::time_point start_;
    std::string started_utc_;
    nlohmann::ordered_json outputs_ = nlohmann::ordered_json::array();
    nlohmann::ordered_json scripts_ = nlohmann::ordered_json::array();
};

/// Grid syntax: "v1,v2,..." or "log:lo:hi:n" or "lin:lo:hi:n".
inline std::vector<double> parse_grid(const std::string& text, const std::string& flag)
{
    auto fail = [&]() -> std::vector<double> {
        throw config_error(0, flag + ": expected v1,v2,... or log:lo:hi:n or lin:lo:hi:n, got '"
                                  + text + "'");
    };
    auto to_double = [&](const std::string& t) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            fail();
        }
        if (used != t.size() || !std::isfinite(v))
            fail();
        return v;
    };
    std::vector<std::string> parts;
    const char sep = (text.rfind("log:", 0) == 0 || text.rfind("lin:", 0) == 0) ? ':' : ',';
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, sep);)
        parts.push_back(p);
    std::vector<double> out;
    if (sep == ':') {
        if (parts.size() != 4)
            return fail();
        const double lo = to_double(parts[1]), hi = to_double(parts[2]);
        const double nd = to_double(parts[3]);
        if (nd < 2 || nd != std::floor(nd) || nd > 100000)
            return fail();
        const int n = static_cast<int>(nd);
        const bool log = parts[0] == "log";
        if (log && !(lo > 0.0 && hi > 0.0))
            return fail();
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / (n - 1);
            out.push_back(log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                              : lo + t * (hi - lo));
        }
        return out;
    }
    for (const auto& p : parts)
        out.push_back(to_double(p));
    if (out.empty())
        return fail();
    return out;
}

} // namespace femtoint::cli
