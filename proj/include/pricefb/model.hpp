#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "pricefb/errors.hpp"
#include "pricefb/profile.hpp"

namespace pricefb {

/// Domain half-width L (maximum price), transaction cost a, initial price p0.
/// Valid iff 0 < a < L and p0 in (-L+a, L-a).
struct ModelParams {
    double L = 1.0;
    double a = 0.5;
    double p0 = 0.0;
};

inline ModelParams validate_params(double L, double a, double p0) {
    std::ostringstream msg;
    if (!std::isfinite(L) || !std::isfinite(a) || !std::isfinite(p0))
        throw ParamError("parameters must be finite");
    if (!(L > 0.0)) {
        msg << "L > 0 violated: L=" << L;
        throw ParamError(msg.str());
    }
    if (!(a > 0.0)) {
        msg << "a > 0 violated: a=" << a;
        throw ParamError(msg.str());
    }
    if (!(a < L)) {
        msg << "a < L violated: a=" << a << ", L=" << L;
        throw ParamError(msg.str());
    }
    if (!(p0 > -L + a && p0 < L - a)) {
        msg << "p0 in (-L+a, L-a) violated: p0=" << p0 << ", interval=(" << (-L + a) << ", "
            << (L - a) << ")";
        throw ParamError(msg.str());
    }
    return ModelParams{L, a, p0};
}

/// Initial datum with the verified sign pattern: positive left of p0,
/// zero at the node nearest p0, negative right of it.
struct CompatibleInitialDatum {
    SampledProfile profile;
    double p0 = 0.0;           // snapped to the node
    double requested_p0 = 0.0; // before snapping
    NodeSnap snap;
};

/// Verifies the (+, 0, -) pattern node by node. sign_tolerance < 0 selects the
/// default 1e-14 * max|f| used for file-sourced data; exact-sign checking
/// (tolerance 0) is what the builtin factories use.
inline CompatibleInitialDatum validate_initial_datum(SampledProfile profile,
                                                     const ModelParams& params,
                                                     double sign_tolerance = -1.0) {
    shift_cells(profile, params.a);
    if (profile.L != params.L)
        throw GridError("profile half-width " + std::to_string(profile.L) +
                        " does not match L=" + std::to_string(params.L));

    const NodeSnap snap = snap_to_node(profile, params.p0);
    const double tol =
        sign_tolerance < 0.0 ? 1e-14 * max_abs(profile) : sign_tolerance;

    const auto fail = [&](int i, const char* what) {
        std::ostringstream msg;
        msg << what << " at node " << i << " (x=" << profile.x(i)
            << ", value=" << profile.values[i] << ")";
        throw CompatibilityError(msg.str());
    };

    const double zv = profile.values[snap.index];
    if (std::abs(zv) > tol) fail(snap.index, "datum must vanish at the node nearest p0; got");
    for (int i = 0; i < snap.index; ++i) {
        const double v = profile.values[i];
        if (tol > 0.0 ? v <= -tol : v <= 0.0) fail(i, "datum must be strictly positive left of p0");
    }
    for (int i = snap.index + 1; i <= profile.n(); ++i) {
        const double v = profile.values[i];
        if (tol > 0.0 ? v >= tol : v >= 0.0) fail(i, "datum must be strictly negative right of p0");
    }

    CompatibleInitialDatum d;
    d.profile = std::move(profile);
    d.p0 = snap.x;
    d.requested_p0 = params.p0;
    d.snap = snap;
    return d;
}

enum class DatumFamily { linear, smoothed_step };

/// Odd quintic ramp: s(+-1) = +-1 with zero first and second derivative there,
/// strictly increasing on (-1, 1), clamped to +-1 outside.
inline double smoothstep_ramp(double u) {
    if (u >= 1.0) return 1.0;
    if (u <= -1.0) return -1.0;
    return u * (15.0 - 10.0 * u * u + 3.0 * u * u * u * u) / 8.0;
}

/// Test-data factory. The linear family is amplitude * (p0 - x); the
/// smoothed-step family is an odd-about-p0 ramp between plateaus +-amplitude
/// whose plateau covers both endpoints, so f_x(+-L) = 0 exactly.
inline CompatibleInitialDatum builtin_initial_datum(DatumFamily family, const ModelParams& params,
                                                    double amplitude, int n) {
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
        throw ParamError("amplitude must be positive, got " + std::to_string(amplitude));
    SampledProfile grid = make_profile(params.L, n);
    shift_cells(grid, params.a);
    const NodeSnap snap = snap_to_node(grid, params.p0);
    const double p0s = snap.x;

    SampledProfile profile;
    switch (family) {
        case DatumFamily::linear:
            profile = sample_function(params.L, n, [&](double x) { return amplitude * (p0s - x); });
            break;
        case DatumFamily::smoothed_step: {
            // Plateau fraction 0.2 of the shorter side keeps the endpoint
            // derivative exactly zero on the grid as well.
            const double r = 0.8 * std::min(params.L - p0s, params.L + p0s);
            if (r < 2.0 * grid.h())
                throw GridError("grid too coarse for the smoothed-step ramp: half-width " +
                                std::to_string(r) + " < 2h");
            profile = sample_function(
                params.L, n, [&](double x) { return amplitude * smoothstep_ramp((p0s - x) / r); });
            break;
        }
    }
    ModelParams snapped = params;
    snapped.p0 = p0s;
    CompatibleInitialDatum d = validate_initial_datum(std::move(profile), snapped, 0.0);
    d.requested_p0 = params.p0;
    d.snap.distance = std::abs(params.p0 - p0s);
    return d;
}

}  // namespace pricefb
