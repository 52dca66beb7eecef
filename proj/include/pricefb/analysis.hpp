#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pricefb/errors.hpp"
#include "pricefb/model.hpp"
#include "pricefb/profile.hpp"
#include "pricefb/quadrature.hpp"
#include "pricefb/spectral.hpp"

namespace pricefb {

struct MassPair {
    double buyers = 0.0;   // M_B = integral of f over (-L, p)
    double vendors = 0.0;  // M_V = -integral of f over (p, L)
};

/// Composite-trapezoid masses with the cell containing p split at p via
/// linear interpolation, so on-node prices integrate exactly.
inline MassPair masses(const SampledProfile& f, double p, const ModelParams& params) {
    if (!(p > -params.L && p < params.L))
        throw BoundaryError("price p=" + std::to_string(p) + " must lie inside (-L, L)");
    const int n = f.n();
    const double h = f.h();
    int i = std::clamp(static_cast<int>(std::floor((p + f.L) / h)), 0, n - 1);
    const double theta = std::clamp((p - f.x(i)) / h, 0.0, 1.0);
    const double fp = (1.0 - theta) * f.values[i] + theta * f.values[i + 1];

    MassPair m;
    m.buyers = trapezoid_range(f, 0, i) + (p - f.x(i)) * 0.5 * (f.values[i] + fp);
    m.vendors = -((f.x(i + 1) - p) * 0.5 * (fp + f.values[i + 1]) + trapezoid_range(f, i + 1, n));
    return m;
}

struct AdmissibilityCheck {
    bool admissible = false;
    double ratio = 0.0;
    double lo = 0.0;  // a / (4L - 3a)
    double hi = 0.0;  // (4L - 3a) / a
    double p_inf = 0.0;
    double alpha = 0.0;
};

/// Mass-ratio criterion: a steady state with the limit price inside
/// [-L+a, L-a] exists iff M_B/M_V lies in [a/(4L-3a), (4L-3a)/a].
inline AdmissibilityCheck nonexistence_check(const MassPair& M, const ModelParams& params) {
    if (!(M.buyers > 0.0) || !(M.vendors > 0.0))
        throw ParamError("masses must be positive: M_B=" + std::to_string(M.buyers) +
                         ", M_V=" + std::to_string(M.vendors));
    AdmissibilityCheck c;
    c.ratio = M.buyers / M.vendors;
    c.lo = params.a / (4.0 * params.L - 3.0 * params.a);
    c.hi = (4.0 * params.L - 3.0 * params.a) / params.a;
    c.admissible = c.ratio >= c.lo && c.ratio <= c.hi;
    c.alpha = (M.buyers + M.vendors) / (2.0 * params.L - params.a);
    c.p_inf = M.buyers / c.alpha - params.L + 0.5 * params.a;
    return c;
}

/// The t -> infinity limit: plateaus +-alpha joined by a ramp of slope
/// -alpha/a across [p_inf - a, p_inf + a]; the heat-side limit is the affine
/// F_inf = -(alpha/a)(x - p_inf).
struct SteadyState {
    double alpha = 0.0;
    double p_inf = 0.0;
    SampledProfile f_inf;
    SampledProfile F_inf;
};

/// Inverts the steady mass identities M_B = alpha (p_inf + L - a/2),
/// M_V = alpha (L - p_inf - a/2). Profiles are sampled on n intervals.
inline SteadyState steady_state(const MassPair& M, const ModelParams& params, int n) {
    const AdmissibilityCheck c = nonexistence_check(M, params);
    if (!c.admissible) {
        std::ostringstream msg;
        msg << "mass ratio " << c.ratio << " outside [" << c.lo << ", " << c.hi
            << "]: no steady state with p_inf in [-L+a, L-a] (p_inf would be " << c.p_inf << ")";
        throw NonexistenceError(msg.str(), c.ratio, c.lo, c.hi);
    }
    SteadyState s;
    s.alpha = c.alpha;
    s.p_inf = c.p_inf;
    const double slope = -s.alpha / params.a;
    s.f_inf = sample_function(params.L, n, [&](double x) {
        if (x < s.p_inf - params.a) return s.alpha;
        if (x > s.p_inf + params.a) return -s.alpha;
        return slope * (x - s.p_inf);
    });
    s.F_inf = sample_function(params.L, n, [&](double x) { return slope * (x - s.p_inf); });
    return s;
}

/// Mass ratios the steady profile attains with the limit price parked at
/// -L+a and L-a; the independent route to the admissibility interval
/// endpoints, straight from the steady mass identities.
inline std::pair<double, double> boundary_consistency(const ModelParams& params) {
    const auto mb = [&](double pbar) { return pbar + params.L - 0.5 * params.a; };
    const auto mv = [&](double pbar) { return params.L - pbar - 0.5 * params.a; };
    const double left = mb(-params.L + params.a) / mv(-params.L + params.a);
    const double right = mb(params.L - params.a) / mv(params.L - params.a);
    return {left, right};
}

struct DecayFit {
    double rate = 0.0;
    double fit_quality = 0.0;  // RMS residual of the log-linear regression
    int points_used = 0;
    double window_start = 0.0;
};

/// Least-squares slope of log ||F(t) - F_inf|| against t. Early samples where
/// the second-slowest mode still contaminates the envelope are excluded:
/// the window opens once exp(-(gamma_2 - gamma_1) t) < 0.01. Norms within
/// 1e3 * eps of the initial scale are treated as converged and skipped.
inline DecayFit measure_decay(const std::vector<double>& times,
                              const std::vector<SampledProfile>& profiles,
                              const SampledProfile& F_inf, const ModelParams& params,
                              double window_start = -1.0) {
    if (times.size() != profiles.size())
        throw ParamError("measure_decay: times and profiles differ in length");
    if (window_start < 0.0) {
        const DecayRates g = decay_rates(params, 2);
        window_start = std::log(100.0) / (g.gamma[1] - g.gamma[0]);
    }
    const double scale = profiles.empty() ? 0.0 : l2_norm(profiles.front());
    const double floor = 1e3 * DBL_EPSILON * scale;

    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window_start) continue;
        const double e = l2_distance(profiles[i], F_inf);
        if (e <= floor) continue;
        ts.push_back(times[i]);
        ys.push_back(std::log(e));
    }
    if (ts.size() < 3)
        throw InsufficientDataError("decay fit needs >= 3 usable samples past t=" +
                                    std::to_string(window_start) + ", got " +
                                    std::to_string(ts.size()));

    const std::size_t k = ts.size();
    double st = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        st += ts[i];
        sy += ys[i];
    }
    const double tbar = st / k, ybar = sy / k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (ts[i] - tbar) * (ts[i] - tbar);
        sxy += (ts[i] - tbar) * (ys[i] - ybar);
    }
    const double slope = sxy / sxx;
    const double intercept = ybar - slope * tbar;
    double rss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double r = ys[i] - (slope * ts[i] + intercept);
        rss += r * r;
    }
    DecayFit fit;
    fit.rate = -slope;
    fit.fit_quality = std::sqrt(rss / k);
    fit.points_used = static_cast<int>(k);
    fit.window_start = window_start;
    return fit;
}

}  // namespace pricefb
