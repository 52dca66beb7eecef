#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "pricefb/errors.hpp"
#include "pricefb/model.hpp"
#include "pricefb/profile.hpp"

namespace pricefb {

/// A signed density f, its heat-side image F, and the current zero location.
struct TransformPair {
    SampledProfile f;
    SampledProfile F;
    double p = 0.0;
};

namespace detail {

// Positive/negative parts extended by zero outside the node range.
// Index clamping (not ghost padding) keeps the sums bit-reproducible.
inline double plus_at(const SampledProfile& f, int i) {
    if (i < 0 || i > f.n()) return 0.0;
    return std::max(f.values[i], 0.0);
}

inline double minus_at(const SampledProfile& f, int i) {
    if (i < 0 || i > f.n()) return 0.0;
    return std::max(-f.values[i], 0.0);
}

// Throws unless f changes sign at most once and, when both signs are
// present, runs positive-to-negative.
inline void check_sign_structure(const SampledProfile& f) {
    int changes = 0;
    int first_sign = 0, last_sign = 0;
    std::vector<double> change_locations;
    for (int i = 0; i <= f.n(); ++i) {
        const double v = f.values[i];
        if (v == 0.0) continue;
        const int s = v > 0.0 ? 1 : -1;
        if (first_sign == 0) first_sign = s;
        if (last_sign != 0 && s != last_sign) {
            ++changes;
            change_locations.push_back(f.x(i));
        }
        last_sign = s;
    }
    if (changes > 1) {
        std::ostringstream msg;
        msg << "profile has " << changes << " sign changes (at x =";
        for (double x : change_locations) msg << ' ' << x;
        msg << "); the transform needs at most one";
        throw SignStructureError(msg.str());
    }
    if (first_sign == -1 && last_sign == 1)
        throw SignStructureError("profile sign orientation is inverted (negative left, positive right)");
}

}  // namespace detail

/// Shift-and-sum map: F(x) = sum_k f^+(x + k*a) left of p and
/// F(x) = -sum_k f^-(x - k*a) right of p, with F(p) = 0 at the snapped node.
/// The sums terminate once the shifted index leaves the grid, which happens
/// after at most ceil(2L/a) terms.
inline SampledProfile forward_transform(const SampledProfile& f, double p,
                                        const ModelParams& params) {
    const int s = shift_cells(f, params.a);
    detail::check_sign_structure(f);
    const NodeSnap snap = snap_to_node(f, p);

    SampledProfile F = make_profile(f.L, f.n());
    for (int i = 0; i < snap.index; ++i) {
        double sum = 0.0;
        for (int j = i; j <= f.n(); j += s) sum += detail::plus_at(f, j);
        F.values[i] = sum;
    }
    F.values[snap.index] = 0.0;
    for (int i = snap.index + 1; i <= f.n(); ++i) {
        double sum = 0.0;
        for (int j = i; j >= 0; j -= s) sum += detail::minus_at(f, j);
        F.values[i] = -sum;
    }
    return F;
}

/// Inverse map f(x) = F(x) - F^+(x+a) + F^-(x-a), with F^+/- taken as zero
/// where the shifted argument leaves [-L, L].
inline SampledProfile inverse_transform(const SampledProfile& F, const ModelParams& params) {
    const int s = shift_cells(F, params.a);
    SampledProfile f = make_profile(F.L, F.n());
    for (int i = 0; i <= F.n(); ++i)
        f.values[i] = F.values[i] - detail::plus_at(F, i + s) + detail::minus_at(F, i - s);
    return f;
}

}  // namespace pricefb
