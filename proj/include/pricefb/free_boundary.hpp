#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pricefb/errors.hpp"
#include "pricefb/model.hpp"
#include "pricefb/profile.hpp"

namespace pricefb {

struct ZeroLocation {
    double x = 0.0;
    bool degenerate = false;  // zero plateau instead of a transversal crossing
};

/// Finds the unique zero level set of F: node scan for sign-change brackets
/// and exact-zero runs, then the linear-interpolation root inside the
/// bracket. A plateau of exact zeros yields its midpoint, flagged degenerate.
/// Several candidates mean the graph-property assumption broke down
/// (usually a truncation artifact) and are reported, not resolved.
inline ZeroLocation locate_zero(const SampledProfile& F) {
    struct Candidate {
        double x;
        bool degenerate;
    };
    std::vector<Candidate> found;

    const int n = F.n();
    int i = 0;
    while (i <= n) {
        const double v = F.values[i];
        if (v == 0.0) {
            int j = i;
            while (j + 1 <= n && F.values[j + 1] == 0.0) ++j;
            found.push_back({0.5 * (F.x(i) + F.x(j)), j > i});
            i = j + 1;
            continue;
        }
        if (i < n) {
            const double w = F.values[i + 1];
            if (w != 0.0 && ((v > 0.0) != (w > 0.0))) {
                const double root = F.x(i) + F.h() * v / (v - w);
                found.push_back({root, false});
            }
        }
        ++i;
    }

    if (found.empty()) throw NoSignChangeError("profile has no zero level set in (-L, L)");
    if (found.size() > 1) {
        std::ostringstream msg;
        msg << "profile has " << found.size() << " zero brackets (x =";
        std::vector<double> xs;
        for (const Candidate& c : found) {
            msg << ' ' << c.x;
            xs.push_back(c.x);
        }
        msg << "); expected a unique zero level set";
        throw MultipleZerosError(msg.str(), xs);
    }
    return {found[0].x, found[0].degenerate};
}

/// Position classes of the free boundary relative to (-L+a, L-a).
/// in_collar means inside the closed interval but within h/2 of an endpoint
/// (touching included); exited means strictly outside the closed interval.
enum class PathStatus { interior, in_collar, exited };

inline const char* to_string(PathStatus s) {
    switch (s) {
        case PathStatus::interior: return "interior";
        case PathStatus::in_collar: return "in-collar";
        case PathStatus::exited: return "exited";
    }
    return "?";
}

struct FreeBoundaryPath {
    std::vector<double> times;
    std::vector<double> p;
    std::vector<PathStatus> status;
    std::vector<bool> degenerate;
};

inline FreeBoundaryPath track(const std::vector<double>& times,
                              const std::vector<SampledProfile>& profiles,
                              const ModelParams& params) {
    if (times.size() != profiles.size())
        throw ParamError("track: times and profiles differ in length");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ParamError("track: times must be increasing");

    FreeBoundaryPath path;
    const double lo = -params.L + params.a;
    const double hi = params.L - params.a;
    for (std::size_t i = 0; i < times.size(); ++i) {
        ZeroLocation z;
        try {
            z = locate_zero(profiles[i]);
        } catch (const MultipleZerosError& e) {
            throw MultipleZerosError("t=" + std::to_string(times[i]) + ": " + e.what(), e.brackets);
        } catch (const NoSignChangeError& e) {
            throw NoSignChangeError("t=" + std::to_string(times[i]) + ": " + e.what());
        }
        const double half_h = 0.5 * profiles[i].h();
        PathStatus st = PathStatus::interior;
        if (z.x < lo || z.x > hi)
            st = PathStatus::exited;
        else if (z.x <= lo + half_h || z.x >= hi - half_h)
            st = PathStatus::in_collar;
        path.times.push_back(times[i]);
        path.p.push_back(z.x);
        path.status.push_back(st);
        path.degenerate.push_back(z.degenerate);
    }
    return path;
}

struct LambdaEstimate {
    double value = 0.0;
    bool degenerate = false;  // profile vanishes on the whole stencil
};

/// Transaction rate lambda = -f_x(p): centered second-order differences at
/// the two nodes bracketing p, blended linearly at p.
inline LambdaEstimate compute_lambda(const SampledProfile& f, double p) {
    const int n = f.n();
    const double h = f.h();
    if (p < -f.L + h || p > f.L - h)
        throw BoundaryError("p=" + std::to_string(p) + " is within h of the boundary +-" +
                            std::to_string(f.L));
    int i = static_cast<int>(std::floor((p + f.L) / h));
    i = std::clamp(i, 1, n - 2);
    const double d_i = (f.values[i + 1] - f.values[i - 1]) / (2.0 * h);
    const double d_ip = (f.values[i + 2] - f.values[i]) / (2.0 * h);
    const double theta = std::clamp((p - f.x(i)) / h, 0.0, 1.0);

    LambdaEstimate est;
    est.value = -((1.0 - theta) * d_i + theta * d_ip);
    double stencil_max = 0.0;
    for (int j = i - 1; j <= i + 2; ++j) stencil_max = std::max(stencil_max, std::abs(f.values[j]));
    const double scale = max_abs(f);
    est.degenerate = scale == 0.0 || stencil_max <= 1e-13 * scale;
    return est;
}

struct Classification {
    bool mass_conserving_global = true;
    double breakdown_time = std::numeric_limits<double>::quiet_NaN();
    int breakdown_index = -1;
};

/// First sampled time with the boundary outside the strict interior of
/// (-L+a, L-a) is the certified breakdown; the open-interval condition means
/// touching the endpoints already counts.
inline Classification classify_global_existence(const FreeBoundaryPath& path) {
    if (path.times.empty()) throw ParamError("classify_global_existence: empty path");
    Classification c;
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        if (path.status[i] != PathStatus::interior) {
            c.mass_conserving_global = false;
            c.breakdown_time = path.times[i];
            c.breakdown_index = static_cast<int>(i);
            break;
        }
    }
    return c;
}

}  // namespace pricefb
