#pragma once

// Line-oriented `section.key=value` configuration. Blank lines and lines
// starting with '#' are ignored; unknown keys are rejected. Every key has a
// default, so an empty file yields the reference scenario:
//
//   grid.block_side=50            grid.street_width=20         grid.window_side=2000
//   radio.tx_power_dbm=20         (or radio.tx_power_mw=100)
//   radio.alpha=4                 radio.attenuation_constant=1e-3
//   radio.wall_loss_db=15         radio.isolation_db=0
//   traffic.lambda=0.1
//   femto.nakagami_m=1            femto.mean_rx_power_dbm=-40 (or femto.mean_rx_power_mw)
//   femto.sir_target_db=15        (or femto.sir_target, linear)
//   model.pathloss=nonsingular    model.include_horizontal=false

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "femtoint/errors.hpp"
#include "femtoint/scenario.hpp"

namespace femtoint {

struct LoadedConfig {
    ScenarioConfig scenario;
    PathlossModel pathloss;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_number(std::string_view text, int line, const std::string& key)
{
    const std::string buf(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size() || errno == ERANGE || !std::isfinite(v))
        throw config_error(line, "invalid number '" + buf + "' for " + key);
    return v;
}

inline bool parse_bool(std::string_view text, int line, const std::string& key)
{
    if (text == "true" || text == "1")
        return true;
    if (text == "false" || text == "0")
        return false;
    throw config_error(line, "invalid boolean '" + std::string(text) + "' for " + key);
}

inline std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline LoadedConfig parse_config(std::string_view text)
{
    LoadedConfig cfg;
    auto& sc = cfg.scenario;
    using Setter = std::function<void(std::string_view, int, const std::string&)>;
    auto number = [](double& target) -> Setter {
        return [&target](std::string_view v, int line, const std::string& key) {
            target = detail::parse_number(v, line, key);
        };
    };
    auto decibel_mw = [](double& target) -> Setter {
        return [&target](std::string_view v, int line, const std::string& key) {
            target = dbm_to_mw(detail::parse_number(v, line, key));
        };
    };

    const std::map<std::string, Setter, std::less<>> setters = {
        {"grid.block_side", number(sc.grid.block_side)},
        {"grid.street_width", number(sc.grid.street_width)},
        {"grid.window_side", number(sc.grid.window_side)},
        {"radio.tx_power_dbm", decibel_mw(sc.radio.tx_power_mw)},
        {"radio.tx_power_mw", number(sc.radio.tx_power_mw)},
        {"radio.alpha", number(sc.radio.pathloss_exponent)},
        {"radio.attenuation_constant", number(sc.radio.attenuation_constant)},
        {"radio.wall_loss_db", number(sc.radio.wall_loss_db)},
        {"radio.isolation_db", number(sc.radio.isolation_db)},
        {"traffic.lambda", number(sc.traffic.density)},
        {"femto.nakagami_m",
         [&](std::string_view v, int line, const std::string& key) {
             const double m = detail::parse_number(v, line, key);
             if (m < 1.0 || m != std::floor(m) || m > 1000.0)
                 throw config_error(line, "femto.nakagami_m must be an integer >= 1");
             sc.femto.nakagami_m = static_cast<int>(m);
         }},
        {"femto.mean_rx_power_dbm", decibel_mw(sc.femto.mean_rx_power_mw)},
        {"femto.mean_rx_power_mw", number(sc.femto.mean_rx_power_mw)},
        {"femto.sir_target_db",
         [&](std::string_view v, int line, const std::string& key) {
             sc.femto.sir_target = db_to_linear(detail::parse_number(v, line, key));
         }},
        {"femto.sir_target", number(sc.femto.sir_target)},
        {"model.pathloss",
         [&](std::string_view v, int line, const std::string&) {
             if (v == "singular")
                 cfg.pathloss.variant = PathlossVariant::Singular;
             else if (v == "nonsingular")
                 cfg.pathloss.variant = PathlossVariant::NonSingular;
             else
                 throw config_error(line, "model.pathloss must be singular or nonsingular");
         }},
        {"model.include_horizontal",
         [&](std::string_view v, int line, const std::string& key) {
             cfg.pathloss.include_horizontal = detail::parse_bool(v, line, key);
         }},
    };
    // pairs that set the same quantity in different units
    const std::map<std::string, std::string> aliases = {
        {"radio.tx_power_mw", "radio.tx_power_dbm"},
        {"femto.mean_rx_power_mw", "femto.mean_rx_power_dbm"},
        {"femto.sir_target", "femto.sir_target_db"},
    };

    std::set<std::string> seen;
    std::map<std::string, int> section_line; // last line touching each section
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw config_error(line_no, "expected section.key=value");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end())
            throw config_error(line_no, "unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw config_error(line_no, "duplicate key '" + key + "'");
        for (const auto& [a, b] : aliases) {
            if ((key == a && seen.count(b)) || (key == b && seen.count(a)))
                throw config_error(line_no, "'" + a + "' and '" + b + "' are mutually exclusive");
        }
        it->second(value, line_no, key);
        section_line[key.substr(0, key.find('.'))] = line_no;
    }

    try {
        sc.validate();
    } catch (const domain_error& e) {
        // messages are prefixed with the failing section, e.g. "radio: ..."
        const std::string what = e.what();
        const auto it = section_line.find(what.substr(0, what.find(':')));
        throw config_error(it == section_line.end() ? 0 : it->second, what);
    }
    return cfg;
}

inline LoadedConfig load_config(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw config_error(0, "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

/// Canonical text of a resolved configuration (linear units, full precision).
/// parse_config(to_config_text(c)) reproduces c.
inline std::string to_config_text(const LoadedConfig& cfg)
{
    const auto& sc = cfg.scenario;
    using detail::format_number;
    std::ostringstream os;
    os << "grid.block_side=" << format_number(sc.grid.block_side) << '\n'
       << "grid.street_width=" << format_number(sc.grid.street_width) << '\n'
       << "grid.window_side=" << format_number(sc.grid.window_side) << '\n'
       << "radio.tx_power_mw=" << format_number(sc.radio.tx_power_mw) << '\n'
       << "radio.alpha=" << format_number(sc.radio.pathloss_exponent) << '\n'
       << "radio.attenuation_constant=" << format_number(sc.radio.attenuation_constant) << '\n'
       << "radio.wall_loss_db=" << format_number(sc.radio.wall_loss_db) << '\n'
       << "radio.isolation_db=" << format_number(sc.radio.isolation_db) << '\n'
       << "traffic.lambda=" << format_number(sc.traffic.density) << '\n'
       << "femto.nakagami_m=" << sc.femto.nakagami_m << '\n'
       << "femto.mean_rx_power_mw=" << format_number(sc.femto.mean_rx_power_mw) << '\n'
       << "femto.sir_target=" << format_number(sc.femto.sir_target) << '\n'
       << "model.pathloss=" << to_string(cfg.pathloss.variant) << '\n'
       << "model.include_horizontal=" << (cfg.pathloss.include_horizontal ? "true" : "false")
       << '\n';
    return os.str();
}

} // namespace femtoint
