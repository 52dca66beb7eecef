#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "pricefb/errors.hpp"

namespace pricefb {

/// Function of x sampled on the uniform grid over [-L, L] with n intervals
/// (n+1 nodes). Immutable by convention once filled.
struct SampledProfile {
    double L = 1.0;
    std::vector<double> values;

    int n() const { return static_cast<int>(values.size()) - 1; }
    double h() const { return 2.0 * L / n(); }

    /// Node coordinate. Exact at the endpoints and, for even n, at x = 0.
    double x(int i) const {
        const int m = n();
        return L * (2.0 * i - m) / m;
    }
};

inline SampledProfile make_profile(double L, int n, double fill = 0.0) {
    if (!(L > 0.0) || !std::isfinite(L))
        throw ParamError("grid half-width L must be positive, got L=" + std::to_string(L));
    if (n < 2) throw GridError("grid needs at least 2 intervals, got n=" + std::to_string(n));
    SampledProfile p;
    p.L = L;
    p.values.assign(static_cast<std::size_t>(n) + 1, fill);
    return p;
}

template <class Fn>
SampledProfile sample_function(double L, int n, Fn&& fn) {
    SampledProfile p = make_profile(L, n);
    for (int i = 0; i <= n; ++i) p.values[static_cast<std::size_t>(i)] = fn(p.x(i));
    return p;
}

inline void require_same_grid(const SampledProfile& a, const SampledProfile& b) {
    if (a.n() != b.n() || a.L != b.L)
        throw GridError("profiles live on different grids (n=" + std::to_string(a.n()) + " vs " +
                        std::to_string(b.n()) + ", L=" + std::to_string(a.L) + " vs " +
                        std::to_string(b.L) + ")");
}

/// Number of grid cells spanned by the shift distance a.
/// The transform and the FD boundary stencils need a/h to be an integer.
inline int shift_cells(const SampledProfile& p, double a) {
    const double ratio = a * p.n() / (2.0 * p.L);
    const long long s = std::llround(ratio);
    if (s < 1 || std::abs(ratio - static_cast<double>(s)) > 1e-9 * std::max(1.0, ratio))
        throw GridError("a/h must be a positive integer: a=" + std::to_string(a) +
                        ", h=" + std::to_string(p.h()) + ", a/h=" + std::to_string(ratio));
    return static_cast<int>(s);
}

struct NodeSnap {
    int index = 0;
    double x = 0.0;        // snapped coordinate (the node)
    double distance = 0.0; // |requested - snapped|, at most h/2
};

inline NodeSnap snap_to_node(const SampledProfile& p, double xq) {
    const int i = std::clamp(static_cast<int>(std::llround((xq + p.L) / p.h())), 0, p.n());
    NodeSnap s;
    s.index = i;
    s.x = p.x(i);
    s.distance = std::abs(xq - s.x);
    return s;
}

inline double max_abs(const SampledProfile& p) {
    double m = 0.0;
    for (double v : p.values) m = std::max(m, std::abs(v));
    return m;
}

/// Max over interior nodes of the centered first difference.
inline double max_abs_central_derivative(const SampledProfile& p) {
    const double inv2h = 1.0 / (2.0 * p.h());
    double m = 0.0;
    for (int i = 1; i < p.n(); ++i)
        m = std::max(m, std::abs((p.values[i + 1] - p.values[i - 1]) * inv2h));
    return m;
}

/// Second difference f(i-1) - 2 f(i) + f(i+1) at an interior node.
inline double second_difference(const SampledProfile& p, int i) {
    return p.values[i - 1] - 2.0 * p.values[i] + p.values[i + 1];
}

}  // namespace pricefb
