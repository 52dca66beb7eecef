#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pricefb/csv.hpp"
#include "pricefb/errors.hpp"
#include "pricefb/fd.hpp"
#include "pricefb/model.hpp"

namespace pricefb {

enum class SolverChoice { spectral, fd, both };

/// Fully resolved run description. The config file is flat `key = value`
/// text under `[section]` headers; the exact grammar is documented in the
/// README. Every module-level constraint is re-validated at load time.
struct RunConfig {
    ModelParams params;
    DatumFamily family = DatumFamily::linear;
    bool datum_from_csv = false;
    std::string datum_path;
    double amplitude = 1.0;
    int n = 0;    // profile grid intervals
    int N = 64;   // spectral truncation
    double T = 0.0;
    std::vector<double> sample_times;  // resolved, increasing, in (0, T]
    SolverChoice solver = SolverChoice::spectral;
    FdConfig fd;  // fd.n = 0 means reuse the profile grid
    std::string output_dir = "out";
};

namespace detail {

struct ConfigEntry {
    std::string value;
    int line = 0;
};
using ConfigMap = std::map<std::string, ConfigEntry>;

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline ConfigMap parse_config_text(const std::string& text, const std::string& source) {
    ConfigMap map;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(source + ": unterminated section header '" + line + "'", line_no);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(source + ": empty section name", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ": expected 'key = value', got '" + line + "'", line_no);
        if (section.empty())
            throw ConfigError(source + ": key outside any [section]: '" + line + "'", line_no);
        const std::string key = section + "." + trim(line.substr(0, eq));
        map[key] = ConfigEntry{trim(line.substr(eq + 1)), line_no};
    }
    return map;
}

inline std::vector<double> parse_double_list(const std::string& s, const std::string& context) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(item, context));
    }
    return out;
}

}  // namespace detail

/// Builds and validates a RunConfig from parsed key/value pairs; each error
/// names the offending field.
inline RunConfig make_run_config(const detail::ConfigMap& map, const std::string& source) {
    static const std::set<std::string> known = {
        "model.L",      "model.a",         "model.p0",          "datum.family",
        "datum.amplitude", "datum.path",   "grid.n",            "spectral.N",
        "time.T",       "time.samples",    "time.sample_times", "solver.kind",
        "fd.n",         "fd.dt",           "fd.scheme",         "output.dir"};
    for (const auto& [key, entry] : map)
        if (!known.count(key))
            throw ConfigError(source + ": unknown key '" + key + "'", entry.line);

    const auto entry = [&](const std::string& key) -> const detail::ConfigEntry* {
        const auto it = map.find(key);
        return it == map.end() ? nullptr : &it->second;
    };
    const auto require = [&](const std::string& key) -> const std::string& {
        const detail::ConfigEntry* e = entry(key);
        if (!e) throw ConfigError(source + ": missing required key '" + key + "'");
        return e->value;
    };
    const auto get_double = [&](const std::string& key, double fallback) {
        const detail::ConfigEntry* e = entry(key);
        return e ? parse_double(e->value, key) : fallback;
    };
    const auto get_int = [&](const std::string& key, int fallback) {
        const detail::ConfigEntry* e = entry(key);
        if (!e) return fallback;
        const double v = parse_double(e->value, key);
        const int i = static_cast<int>(std::llround(v));
        if (std::abs(v - i) > 0.0) throw ConfigError(key + " must be an integer, got " + e->value);
        return i;
    };

    RunConfig cfg;
    cfg.params = validate_params(parse_double(require("model.L"), "model.L"),
                                 parse_double(require("model.a"), "model.a"),
                                 parse_double(require("model.p0"), "model.p0"));

    const std::string family = entry("datum.family") ? entry("datum.family")->value : "linear";
    if (family == "linear") {
        cfg.family = DatumFamily::linear;
    } else if (family == "smoothed-step") {
        cfg.family = DatumFamily::smoothed_step;
    } else if (family == "csv") {
        cfg.datum_from_csv = true;
        cfg.datum_path = require("datum.path");
    } else {
        throw ConfigError("datum.family must be linear, smoothed-step or csv; got '" + family + "'");
    }
    cfg.amplitude = get_double("datum.amplitude", 1.0);
    if (!cfg.datum_from_csv && !(cfg.amplitude > 0.0))
        throw ConfigError("datum.amplitude must be positive");

    cfg.n = get_int("grid.n", 0);
    if (cfg.n < 2) throw ConfigError("grid.n must be >= 2 (missing or too small)");
    cfg.N = get_int("spectral.N", 64);
    if (cfg.N < 1) throw ConfigError("spectral.N must be >= 1");

    cfg.T = get_double("time.T", -1.0);
    if (!(cfg.T > 0.0)) throw ConfigError("time.T must be positive (missing?)");
    if (entry("time.sample_times")) {
        cfg.sample_times = detail::parse_double_list(entry("time.sample_times")->value,
                                                     "time.sample_times");
        if (cfg.sample_times.empty()) throw ConfigError("time.sample_times is empty");
        if (!std::is_sorted(cfg.sample_times.begin(), cfg.sample_times.end()))
            throw ConfigError("time.sample_times must be increasing");
        if (cfg.sample_times.front() <= 0.0 || cfg.sample_times.back() > cfg.T * (1.0 + 1e-12))
            throw ConfigError("time.sample_times must lie in (0, T]");
    } else {
        const int k = get_int("time.samples", 10);
        if (k < 1) throw ConfigError("time.samples must be >= 1");
        for (int j = 1; j <= k; ++j) cfg.sample_times.push_back(cfg.T * j / k);
    }

    const std::string solver = entry("solver.kind") ? entry("solver.kind")->value : "spectral";
    if (solver == "spectral")
        cfg.solver = SolverChoice::spectral;
    else if (solver == "fd")
        cfg.solver = SolverChoice::fd;
    else if (solver == "both")
        cfg.solver = SolverChoice::both;
    else
        throw ConfigError("solver.kind must be spectral, fd or both; got '" + solver + "'");

    cfg.fd.n = get_int("fd.n", 0);
    cfg.fd.dt = get_double("fd.dt", 1e-4);
    if (!(cfg.fd.dt > 0.0)) throw ConfigError("fd.dt must be positive");
    cfg.fd.T = cfg.T;
    const std::string scheme = entry("fd.scheme") ? entry("fd.scheme")->value : "crank-nicolson";
    if (scheme == "crank-nicolson")
        cfg.fd.scheme = FdScheme::crank_nicolson;
    else if (scheme == "implicit-euler")
        cfg.fd.scheme = FdScheme::implicit_euler;
    else
        throw ConfigError("fd.scheme must be crank-nicolson or implicit-euler; got '" + scheme + "'");

    if (entry("output.dir")) cfg.output_dir = entry("output.dir")->value;

    // Structural grid constraints, re-checked here so a bad config fails
    // before any work starts.
    shift_cells(make_profile(cfg.params.L, cfg.n), cfg.params.a);
    if (cfg.solver != SolverChoice::fd && cfg.n % 2 != 0)
        throw ConfigError("grid.n must be even for spectral runs (composite Simpson)");
    if (cfg.solver != SolverChoice::spectral) {
        const int nfd = cfg.fd.n > 0 ? cfg.fd.n : cfg.n;
        shift_cells(make_profile(cfg.params.L, nfd), cfg.params.a);
        if (nfd % 2 != 0) throw ConfigError("fd.n must be even (L2 comparisons use Simpson)");
    }
    return cfg;
}

inline RunConfig load_run_config(const std::string& path,
                                 const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    detail::ConfigMap map = detail::parse_config_text(buffer.str(), path);
    for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override must look like section.key=value, got '" + o + "'");
        const std::string key = detail::trim(o.substr(0, eq));
        if (key.find('.') == std::string::npos)
            throw ConfigError("override key must be section.key, got '" + key + "'");
        map[key] = detail::ConfigEntry{detail::trim(o.substr(eq + 1)), 0};
    }
    return make_run_config(map, path);
}

/// Canonical config text for a resolved RunConfig; parsing it back yields an
/// identical run (the deterministic pipeline then reproduces outputs
/// bit-for-bit).
inline std::string config_text(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[model]\n";
    out << "L = " << format_double(cfg.params.L) << '\n';
    out << "a = " << format_double(cfg.params.a) << '\n';
    out << "p0 = " << format_double(cfg.params.p0) << '\n';
    out << "[datum]\n";
    if (cfg.datum_from_csv) {
        out << "family = csv\n";
        out << "path = " << cfg.datum_path << '\n';
    } else {
        out << "family = " << (cfg.family == DatumFamily::linear ? "linear" : "smoothed-step")
            << '\n';
        out << "amplitude = " << format_double(cfg.amplitude) << '\n';
    }
    out << "[grid]\n";
    out << "n = " << cfg.n << '\n';
    out << "[spectral]\n";
    out << "N = " << cfg.N << '\n';
    out << "[time]\n";
    out << "T = " << format_double(cfg.T) << '\n';
    out << "sample_times = ";
    for (std::size_t i = 0; i < cfg.sample_times.size(); ++i)
        out << (i ? ", " : "") << format_double(cfg.sample_times[i]);
    out << '\n';
    out << "[solver]\n";
    out << "kind = "
        << (cfg.solver == SolverChoice::spectral ? "spectral"
            : cfg.solver == SolverChoice::fd     ? "fd"
                                                 : "both")
        << '\n';
    out << "[fd]\n";
    out << "n = " << cfg.fd.n << '\n';
    out << "dt = " << format_double(cfg.fd.dt) << '\n';
    out << "scheme = "
        << (cfg.fd.scheme == FdScheme::crank_nicolson ? "crank-nicolson" : "implicit-euler")
        << '\n';
    out << "[output]\n";
    out << "dir = " << cfg.output_dir << '\n';
    return out.str();
}

}  // namespace pricefb
