#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pricefb/errors.hpp"
#include "pricefb/model.hpp"
#include "pricefb/profile.hpp"
#include "pricefb/quadrature.hpp"

namespace pricefb {

enum class FdScheme { implicit_euler, crank_nicolson };

struct FdConfig {
    int n = 0;  // grid intervals; 0 means take the initial profile's grid
    double dt = 1e-4;
    double T = 0.0;
    FdScheme scheme = FdScheme::crank_nicolson;
};

struct FdResult {
    std::vector<double> times;  // snapped sample times
    std::vector<SampledProfile> profiles;
    std::vector<std::string> warnings;
};

/// Theta-stepped heat solver with the nonlocal conditions
/// F_x(-L) = F_x(-L+a) and F_x(L) = F_x(L-a). The boundary rows equate the
/// second-order one-sided difference at the endpoint with the centered
/// difference a grid-exact shift inward; first-order matching would drag the
/// global rate below O(h^2). The step matrix is factorized once.
inline FdResult solve_heat_fd(const SampledProfile& F_I, const ModelParams& params,
                              const FdConfig& cfg, const std::vector<double>& sample_times) {
    const int n = F_I.n();
    if (cfg.n > 0 && cfg.n != n)
        throw GridError("FD config grid n=" + std::to_string(cfg.n) +
                        " does not match the initial profile n=" + std::to_string(n));
    const int m = shift_cells(F_I, params.a);
    if (!(cfg.dt > 0.0)) throw ParamError("dt must be positive, got " + std::to_string(cfg.dt));
    if (cfg.T < 0.0) throw ParamError("T must be nonnegative, got " + std::to_string(cfg.T));

    FdResult out;
    const double h = F_I.h();
    if (cfg.scheme == FdScheme::crank_nicolson && cfg.dt > h) {
        std::ostringstream w;
        w << "crank-nicolson with dt=" << cfg.dt << " > h=" << h
          << "; profiles from rough data may oscillate (dt <= h recommended)";
        out.warnings.push_back(w.str());
    }

    // Snap sample times to step multiples.
    std::map<long long, std::vector<std::size_t>> emit_at;
    out.times.resize(sample_times.size());
    out.profiles.resize(sample_times.size());
    long long k_max = 0;
    for (std::size_t j = 0; j < sample_times.size(); ++j) {
        const double t = sample_times[j];
        if (t < 0.0) throw ParamError("sample time must be nonnegative, got " + std::to_string(t));
        const long long k = std::llround(t / cfg.dt);
        if (std::abs(t - k * cfg.dt) > 1e-9 * std::max(cfg.dt, std::abs(t))) {
            std::ostringstream w;
            w << "sample time " << t << " snapped to " << k * cfg.dt << " (multiple of dt)";
            out.warnings.push_back(w.str());
        }
        out.times[j] = k * cfg.dt;
        emit_at[k].push_back(j);
        k_max = std::max(k_max, k);
    }

    const double theta = cfg.scheme == FdScheme::implicit_euler ? 1.0 : 0.5;
    const double mu = cfg.dt / (h * h);

    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> lhs, rhs_op;
    lhs.reserve(3 * n + 10);
    rhs_op.reserve(3 * n);
    for (int i = 1; i < n; ++i) {
        lhs.emplace_back(i, i - 1, -theta * mu);
        lhs.emplace_back(i, i, 1.0 + 2.0 * theta * mu);
        lhs.emplace_back(i, i + 1, -theta * mu);
        rhs_op.emplace_back(i, i - 1, (1.0 - theta) * mu);
        rhs_op.emplace_back(i, i, 1.0 - 2.0 * (1.0 - theta) * mu);
        rhs_op.emplace_back(i, i + 1, (1.0 - theta) * mu);
    }
    // -3F_0 + 4F_1 - F_2 = F_{m+1} - F_{m-1}  (2h cancels)
    lhs.emplace_back(0, 0, -3.0);
    lhs.emplace_back(0, 1, 4.0);
    lhs.emplace_back(0, 2, -1.0);
    lhs.emplace_back(0, m + 1, -1.0);
    lhs.emplace_back(0, m - 1, 1.0);
    // 3F_n - 4F_{n-1} + F_{n-2} = F_{n-m+1} - F_{n-m-1}
    lhs.emplace_back(n, n, 3.0);
    lhs.emplace_back(n, n - 1, -4.0);
    lhs.emplace_back(n, n - 2, 1.0);
    lhs.emplace_back(n, n - m + 1, -1.0);
    lhs.emplace_back(n, n - m - 1, 1.0);

    Eigen::SparseMatrix<double> M(n + 1, n + 1), B(n + 1, n + 1);
    M.setFromTriplets(lhs.begin(), lhs.end());
    B.setFromTriplets(rhs_op.begin(), rhs_op.end());

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(M);
    lu.factorize(M);
    if (lu.info() != Eigen::Success)
        throw SingularSystemError("time-step matrix factorization failed (boundary rows inconsistent?)");

    Eigen::VectorXd F = Eigen::Map<const Eigen::VectorXd>(F_I.values.data(), n + 1);
    const auto emit = [&](long long k) {
        auto it = emit_at.find(k);
        if (it == emit_at.end()) return;
        for (std::size_t j : it->second) {
            SampledProfile p = make_profile(F_I.L, n);
            Eigen::Map<Eigen::VectorXd>(p.values.data(), n + 1) = F;
            out.profiles[j] = std::move(p);
        }
    };
    emit(0);
    for (long long k = 1; k <= k_max; ++k) {
        Eigen::VectorXd rhs = B * F;
        rhs(0) = 0.0;
        rhs(n) = 0.0;
        F = lu.solve(rhs);
        emit(k);
    }
    return out;
}

/// Composite-trapezoid values of the conserved boundary-strip integrals
/// over [-L, -L+a] and [L-a, L]. The strip ends land on nodes because a/h
/// is an integer.
inline std::pair<double, double> strip_integrals(const SampledProfile& F,
                                                 const ModelParams& params) {
    const int m = shift_cells(F, params.a);
    return {trapezoid_range(F, 0, m), trapezoid_range(F, F.n() - m, F.n())};
}

}  // namespace pricefb
