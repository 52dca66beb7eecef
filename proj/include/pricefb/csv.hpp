#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pricefb/errors.hpp"
#include "pricefb/profile.hpp"
#include "pricefb/spectral.hpp"

namespace pricefb {

/// Full double precision: 17 significant digits round-trip exactly.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s, const std::string& context) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0'))
        throw ConfigError("cannot parse number '" + s + "' in " + context);
    return v;
}

/// Two-column profile CSV: header `x,value`, one node per row.
inline void write_profile_csv(const std::string& path, const SampledProfile& p) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "x,value\n";
    for (int i = 0; i <= p.n(); ++i)
        out << format_double(p.x(i)) << ',' << format_double(p.values[i]) << '\n';
}

inline SampledProfile read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty profile file '" + path + "'");
    std::vector<double> xs, vs;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError("expected 'x,value' in '" + path + "'", line_no);
        const std::string ctx = path + ":" + std::to_string(line_no);
        xs.push_back(parse_double(line.substr(0, comma), ctx));
        vs.push_back(parse_double(line.substr(comma + 1), ctx));
    }
    if (xs.size() < 3) throw GridError("profile file '" + path + "' has fewer than 3 nodes");

    const int n = static_cast<int>(xs.size()) - 1;
    const double L = 0.5 * (xs.back() - xs.front());
    if (!(L > 0.0) || std::abs(xs.front() + L) > 1e-12 * L)
        throw GridError("profile grid in '" + path + "' must span [-L, L] symmetrically");
    SampledProfile p = make_profile(L, n);
    for (int i = 0; i <= n; ++i) {
        if (std::abs(xs[i] - p.x(i)) > 1e-9 * p.h())
            throw GridError("profile grid in '" + path + "' is not uniform near row " +
                            std::to_string(i + 2));
        p.values[i] = vs[i];
    }
    return p;
}

inline void write_frequencies_csv(const std::string& path, const EigenFrequencies& fr) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "family,l,value\n";
    for (int l = 1; l <= fr.N; ++l) out << "omega1," << l << ',' << format_double(fr.omega1[l - 1]) << '\n';
    for (int l = 1; l <= fr.N; ++l) out << "omega2," << l << ',' << format_double(fr.omega2[l - 1]) << '\n';
    for (int l = 1; l <= fr.N; ++l) out << "omega3," << l << ',' << format_double(fr.omega3[l - 1]) << '\n';
}

inline void write_coefficients_csv(const std::string& path, const SpectralCoefficients& c) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "family,l,value\n";
    const int N = c.N();
    for (int l = 1; l <= N; ++l) out << "A," << l << ',' << format_double(c.A[l - 1]) << '\n';
    for (int l = 1; l <= N; ++l) out << "B," << l << ',' << format_double(c.B[l - 1]) << '\n';
    for (int l = 1; l <= N; ++l) out << "C," << l << ',' << format_double(c.C[l - 1]) << '\n';
    for (int l = 1; l <= N; ++l) out << "D," << l << ',' << format_double(c.D[l - 1]) << '\n';
    out << "A0,0," << format_double(c.A0) << '\n';
    out << "B0,0," << format_double(c.B0) << '\n';
}

}  // namespace pricefb
