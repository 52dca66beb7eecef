#pragma once

#include <cmath>
#include <random>

#include "pricefb/model.hpp"
#include "pricefb/profile.hpp"

namespace testutil {

// Randomized compatible datum: amplitude * (p0 - x) times a strictly
// positive oscillatory modulation, so the sign pattern is inherited from
// the linear factor and the zero node stays exact.
inline pricefb::CompatibleInitialDatum random_compatible_datum(const pricefb::ModelParams& params,
                                                               int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> amp(0.5, 2.0);
    std::uniform_real_distribution<double> wave(1.0, 12.0);
    std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);

    pricefb::SampledProfile grid = pricefb::make_profile(params.L, n);
    const pricefb::NodeSnap snap = pricefb::snap_to_node(grid, params.p0);
    const double p0s = snap.x;
    const double A = amp(rng);
    const double k1 = wave(rng), k2 = wave(rng);
    const double f1 = phase(rng), f2 = phase(rng);

    pricefb::SampledProfile profile = pricefb::sample_function(params.L, n, [&](double x) {
        const double mod = 1.0 + 0.45 * std::sin(k1 * x + f1) + 0.25 * std::sin(k2 * x + f2);
        return A * (p0s - x) * mod;
    });
    pricefb::ModelParams snapped = params;
    snapped.p0 = p0s;
    return pricefb::validate_initial_datum(std::move(profile), snapped, 0.0);
}

inline double rel_max_error(const pricefb::SampledProfile& got, const pricefb::SampledProfile& want) {
    double err = 0.0, scale = 0.0;
    for (int i = 0; i <= got.n(); ++i) {
        err = std::max(err, std::abs(got.values[i] - want.values[i]));
        scale = std::max(scale, std::abs(want.values[i]));
    }
    return scale > 0.0 ? err / scale : err;
}

}  // namespace testutil
