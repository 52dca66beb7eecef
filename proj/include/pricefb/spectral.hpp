#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pricefb/errors.hpp"
#include "pricefb/model.hpp"
#include "pricefb/profile.hpp"
#include "pricefb/quadrature.hpp"

namespace pricefb {

/// The three closed-form eigenfrequency families of the boundary-coupled
/// heat operator: omega1[l] = 2*pi*l/a (sin and cos modes),
/// omega2[l] = 2*pi*l/(2L-a) (sin), omega3[l] = (2l-1)*pi/(2L-a) (cos).
struct EigenFrequencies {
    int N = 0;
    std::vector<double> omega1, omega2, omega3;
};

inline EigenFrequencies eigenfrequencies(const ModelParams& params, int N) {
    if (N < 1) throw ParamError("truncation order N must be >= 1, got " + std::to_string(N));
    constexpr double two_pi = 2.0 * std::numbers::pi;
    EigenFrequencies fr;
    fr.N = N;
    fr.omega1.resize(N);
    fr.omega2.resize(N);
    fr.omega3.resize(N);
    const double span = 2.0 * params.L - params.a;
    for (int l = 1; l <= N; ++l) {
        fr.omega1[l - 1] = two_pi * l / params.a;
        fr.omega2[l - 1] = two_pi * l / span;
        fr.omega3[l - 1] = (2.0 * l - 1.0) * std::numbers::pi / span;
    }
    return fr;
}

struct DispersionResidual {
    double G = 0.0;  // cos(zL) - cos(z(L-a)); zeros carry the sin modes
    double H = 0.0;  // sin(zL) - sin(z(L-a)); zeros carry the cos modes
};

inline DispersionResidual verify_dispersion(double z, const ModelParams& params) {
    DispersionResidual r;
    r.G = std::cos(z * params.L) - std::cos(z * (params.L - params.a));
    r.H = std::sin(z * params.L) - std::sin(z * (params.L - params.a));
    return r;
}

/// Truncated series coefficients: modes A (sin omega1), B (cos omega1),
/// C (sin omega2), D (cos omega3) plus the affine part A0 x + B0.
struct SpectralCoefficients {
    double A0 = 0.0;
    double B0 = 0.0;
    std::vector<double> A, B, C, D;

    int N() const { return static_cast<int>(A.size()); }
};

struct ProjectionDiagnostics {
    double residual_l2 = 0.0;
    double residual_rel = 0.0;
    double input_l2 = 0.0;
    double gram_lambda_min = 0.0;  // smallest retained eigenvalue, normalized Gram
    double gram_lambda_max = 0.0;
    double condition = 0.0;
    double frame_lower = 0.0;  // c1, c2 estimates reported as eigenvalue extremes
    double frame_upper = 0.0;
    double normalized_energy = 0.0;  // coefficient energy in the unit-norm basis
    int collisions = 0;  // analytic frequency coincidences across families
    int dropped = 0;     // eigenvalues truncated by the rank-revealing cutoff
    double nodes_per_shortest_period = 0.0;
};

struct Projection {
    SpectralCoefficients coeffs;
    ProjectionDiagnostics diag;
};

/// Exact coincidences between the sin families (omega1 vs omega2) and the
/// cos families (omega1 vs omega3). They occur whenever a/(2L-a) is rational
/// with a small denominator and make the Gram matrix rank-deficient by that
/// count; the projection treats them as expected degeneracy.
inline int count_frequency_collisions(const EigenFrequencies& fr) {
    int c = 0;
    for (int i = 0; i < fr.N; ++i)
        for (int j = 0; j < fr.N; ++j) {
            if (std::abs(fr.omega1[i] - fr.omega2[j]) <= 1e-9 * fr.omega1[i]) ++c;
            if (std::abs(fr.omega1[i] - fr.omega3[j]) <= 1e-9 * fr.omega1[i]) ++c;
        }
    return c;
}

namespace detail {

// Basis layout: [0,N) sin(omega1 x), [N,2N) cos(omega1 x),
// [2N,3N) sin(omega2 x), [3N,4N) cos(omega3 x), [4N] x, [4N+1] 1.
inline double basis_value(const EigenFrequencies& fr, int k, double x) {
    const int N = fr.N;
    if (k < N) return std::sin(fr.omega1[k] * x);
    if (k < 2 * N) return std::cos(fr.omega1[k - N] * x);
    if (k < 3 * N) return std::sin(fr.omega2[k - 2 * N] * x);
    if (k < 4 * N) return std::cos(fr.omega3[k - 3 * N] * x);
    return k == 4 * N ? x : 1.0;
}

}  // namespace detail

/// L2 best approximation of F_I in the truncated Riesz basis, by composite
/// Simpson Gram assembly and a rank-revealing eigendecomposition solve.
/// Exact frequency collisions are resolved minimum-norm; any rank loss
/// beyond the analytic collision count signals quadrature failure.
inline Projection project(const SampledProfile& F_I, const ModelParams& params, int N) {
    const EigenFrequencies fr = eigenfrequencies(params, N);
    const int n = F_I.n();
    require_even_intervals(n, "spectral projection");

    const double shortest_period = params.a / N;  // 2*pi / omega1[N-1]
    const double nodes_per_period = shortest_period / F_I.h();
    if (nodes_per_period < 8.0 - 1e-9)
        throw GridError("grid under-resolves the highest basis mode: " +
                        std::to_string(nodes_per_period) +
                        " nodes per shortest period, need >= 8 (raise n or lower N)");

    const int M = 4 * N + 2;
    Eigen::MatrixXd Phi(n + 1, M);
    for (int k = 0; k < M; ++k)
        for (int i = 0; i <= n; ++i) Phi(i, k) = detail::basis_value(fr, k, F_I.x(i));

    const std::vector<double> wv = simpson_weights(n, F_I.h());
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(wv.data(), n + 1);
    Eigen::VectorXd Fv = Eigen::Map<const Eigen::VectorXd>(F_I.values.data(), n + 1);

    const Eigen::MatrixXd WPhi = w.asDiagonal() * Phi;
    Eigen::MatrixXd G = Phi.transpose() * WPhi;
    G = 0.5 * (G + G.transpose());  // enforce symmetry against rounding
    const Eigen::VectorXd b = WPhi.transpose() * Fv;

    // Normalize to unit diagonal so the eigenvalue extremes double as the
    // reported frame-bound estimates.
    Eigen::VectorXd d = G.diagonal().cwiseSqrt();
    for (int k = 0; k < M; ++k)
        if (!(d(k) > 0.0)) throw IllConditionedError("basis element " + std::to_string(k) +
                                                     " has non-positive quadrature norm");
    const Eigen::MatrixXd Gn = d.cwiseInverse().asDiagonal() * G * d.cwiseInverse().asDiagonal();
    const Eigen::VectorXd bn = b.cwiseQuotient(d);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gn);
    if (es.info() != Eigen::Success) throw IllConditionedError("Gram eigendecomposition failed");
    const Eigen::VectorXd& lam = es.eigenvalues();  // ascending
    const Eigen::MatrixXd& V = es.eigenvectors();

    const double lam_max = lam(M - 1);
    const double cutoff = 1e-12 * lam_max;
    const int collisions = count_frequency_collisions(fr);

    int dropped = 0;
    double lam_min_kept = lam_max;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(M);
    const Eigen::VectorXd proj = V.transpose() * bn;
    for (int k = 0; k < M; ++k) {
        if (lam(k) <= cutoff) {
            ++dropped;
            continue;
        }
        lam_min_kept = std::min(lam_min_kept, lam(k));
        y += (proj(k) / lam(k)) * V.col(k);
    }
    if (dropped > collisions) {
        std::ostringstream msg;
        msg << "Gram matrix lost rank " << dropped << " but only " << collisions
            << " frequency collisions are expected; quadrature or grid failure";
        throw IllConditionedError(msg.str());
    }
    const double condition = lam_max / lam_min_kept;
    if (condition > 1e12)
        throw IllConditionedError("Gram condition estimate " + std::to_string(condition) +
                                  " exceeds 1e12");

    const Eigen::VectorXd c = y.cwiseQuotient(d);

    Projection out;
    out.coeffs.A.assign(c.data(), c.data() + N);
    out.coeffs.B.assign(c.data() + N, c.data() + 2 * N);
    out.coeffs.C.assign(c.data() + 2 * N, c.data() + 3 * N);
    out.coeffs.D.assign(c.data() + 3 * N, c.data() + 4 * N);
    out.coeffs.A0 = c(4 * N);
    out.coeffs.B0 = c(4 * N + 1);

    const Eigen::VectorXd r = Fv - Phi * c;
    double rr = 0.0, ff = 0.0;
    for (int i = 0; i <= n; ++i) {
        rr += w(i) * r(i) * r(i);
        ff += w(i) * Fv(i) * Fv(i);
    }
    out.diag.residual_l2 = std::sqrt(std::max(rr, 0.0));
    out.diag.input_l2 = std::sqrt(std::max(ff, 0.0));
    out.diag.residual_rel = ff > 0.0 ? out.diag.residual_l2 / std::sqrt(ff) : 0.0;
    out.diag.normalized_energy = y.squaredNorm();
    out.diag.gram_lambda_min = lam_min_kept;
    out.diag.gram_lambda_max = lam_max;
    out.diag.condition = condition;
    out.diag.frame_lower = lam_min_kept;
    out.diag.frame_upper = lam_max;
    out.diag.collisions = collisions;
    out.diag.dropped = dropped;
    out.diag.nodes_per_shortest_period = nodes_per_period;
    return out;
}

/// Series value at (x, t). Every mode decays with exp(-omega^2 t); the
/// affine part A0 x + B0 is the t -> infinity limit.
inline double evaluate(const SpectralCoefficients& c, const EigenFrequencies& fr, double x,
                       double t) {
    if (c.N() != fr.N)
        throw ParamError("coefficient truncation " + std::to_string(c.N()) +
                         " does not match frequency truncation " + std::to_string(fr.N));
    double s = c.A0 * x + c.B0;
    for (int l = 0; l < fr.N; ++l) {
        const double w1 = fr.omega1[l], w2 = fr.omega2[l], w3 = fr.omega3[l];
        const double e1 = std::exp(-w1 * w1 * t);
        if (e1 > 0.0 && (c.A[l] != 0.0 || c.B[l] != 0.0))
            s += (c.A[l] * std::sin(w1 * x) + c.B[l] * std::cos(w1 * x)) * e1;
        if (c.C[l] != 0.0) s += c.C[l] * std::sin(w2 * x) * std::exp(-w2 * w2 * t);
        if (c.D[l] != 0.0) s += c.D[l] * std::cos(w3 * x) * std::exp(-w3 * w3 * t);
    }
    return s;
}

inline SampledProfile evaluate_profile(const SpectralCoefficients& c, const EigenFrequencies& fr,
                                       double L, int n, double t) {
    SampledProfile p = make_profile(L, n);
    for (int i = 0; i <= n; ++i) p.values[i] = evaluate(c, fr, p.x(i), t);
    return p;
}

/// Modal decay-rate sequence gamma[l] = min over the three families of the
/// squared frequency at index l; gamma[1] = pi^2/(2L-a)^2 for all valid
/// parameters (the cos(omega3) family attains the minimum at l = 1).
struct DecayRates {
    std::vector<double> gamma;  // gamma[l-1] for l = 1..N
};

inline DecayRates decay_rates(const ModelParams& params, int N) {
    const EigenFrequencies fr = eigenfrequencies(params, N);
    DecayRates r;
    r.gamma.resize(N);
    for (int l = 0; l < N; ++l) {
        const double g1 = fr.omega1[l] * fr.omega1[l];
        const double g2 = fr.omega2[l] * fr.omega2[l];
        const double g3 = fr.omega3[l] * fr.omega3[l];
        r.gamma[l] = std::min(g1, std::min(g2, g3));
    }
    return r;
}

/// The affine part (A0, B0): the t -> infinity limit profile F_inf.
inline std::pair<double, double> steady_part(const SpectralCoefficients& c) {
    return {c.A0, c.B0};
}

}  // namespace pricefb
