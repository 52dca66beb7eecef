#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pricefb/errors.hpp"
#include "pricefb/profile.hpp"

namespace pricefb {

/// Composite trapezoid over nodes [i0, i1]. Exact for piecewise-linear data
/// whose kinks sit on nodes, which is what the steady profiles look like.
inline double trapezoid_range(const SampledProfile& p, int i0, int i1) {
    if (i1 <= i0) return 0.0;
    double s = 0.5 * (p.values[i0] + p.values[i1]);
    for (int i = i0 + 1; i < i1; ++i) s += p.values[i];
    return s * p.h();
}

inline double trapezoid(const SampledProfile& p) { return trapezoid_range(p, 0, p.n()); }

inline void require_even_intervals(int n, const char* what) {
    if (n % 2 != 0)
        throw GridError(std::string(what) + " needs an even interval count, got n=" + std::to_string(n));
}

/// Composite Simpson weights for n intervals (n even).
inline std::vector<double> simpson_weights(int n, double h) {
    require_even_intervals(n, "composite Simpson");
    std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
    const double c = h / 3.0;
    w[0] = c;
    w[static_cast<std::size_t>(n)] = c;
    for (int i = 1; i < n; ++i) w[static_cast<std::size_t>(i)] = (i % 2 == 1) ? 4.0 * c : 2.0 * c;
    return w;
}

inline double simpson(const SampledProfile& p) {
    const std::vector<double> w = simpson_weights(p.n(), p.h());
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * p.values[i];
    return s;
}

/// L2(-L, L) norm by composite Simpson.
inline double l2_norm(const SampledProfile& p) {
    const std::vector<double> w = simpson_weights(p.n(), p.h());
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * p.values[i] * p.values[i];
    return std::sqrt(std::max(s, 0.0));
}

inline double l2_distance(const SampledProfile& a, const SampledProfile& b) {
    require_same_grid(a, b);
    const std::vector<double> w = simpson_weights(a.n(), a.h());
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        s += w[i] * d * d;
    }
    return std::sqrt(std::max(s, 0.0));
}

}  // namespace pricefb
