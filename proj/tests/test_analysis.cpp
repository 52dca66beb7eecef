#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pricefb/analysis.hpp"
#include "pricefb/free_boundary.hpp"
#include "pricefb/model.hpp"
#include "pricefb/transform.hpp"

using namespace pricefb;
constexpr double pi = std::numbers::pi;

namespace {

SampledProfile steady_profile(double alpha, double p_inf, double a, double L, int n) {
    return sample_function(L, n, [=](double x) {
        if (x < p_inf - a) return alpha;
        if (x > p_inf + a) return -alpha;
        return -(alpha / a) * (x - p_inf);
    });
}

}  // namespace

TEST_CASE("masses integrate the steady and linear profiles exactly", "[analysis]") {
    const ModelParams params = validate_params(1.0, 0.5, 0.0);

    const SampledProfile steady = steady_profile(1.0, 0.0, 0.5, 1.0, 400);
    const MassPair m = masses(steady, 0.0, params);
    REQUIRE(m.buyers == Catch::Approx(0.75).margin(1e-14));
    REQUIRE(m.vendors == Catch::Approx(0.75).margin(1e-14));

    const SampledProfile linear = sample_function(1.0, 400, [](double x) { return -x; });
    const MassPair ml = masses(linear, 0.0, params);
    REQUIRE(ml.buyers == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(ml.vendors == Catch::Approx(0.5).margin(1e-14));

    const MassPair mz = masses(make_profile(1.0, 400), 0.0, params);
    REQUIRE(mz.buyers == 0.0);
    REQUIRE(mz.vendors == 0.0);
}

TEST_CASE("masses split the cell containing an off-node price", "[analysis]") {
    const ModelParams params = validate_params(1.0, 0.5, 0.0);
    // n odd => 0 is not a node, the split does the work; integrand is linear
    // so the split-trapezoid rule stays exact
    const SampledProfile linear = sample_function(1.0, 401, [](double x) { return -x; });
    const MassPair m = masses(linear, 0.0, params);
    REQUIRE(m.buyers == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(m.vendors == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("steady_state inverts the mass identities", "[analysis]") {
    const ModelParams params = validate_params(1.0, 0.5, 0.0);

    SECTION("symmetric masses center the price") {
        const SteadyState s = steady_state(MassPair{0.75, 0.75}, params, 400);
        REQUIRE(s.alpha == Catch::Approx(1.0).margin(1e-14));
        REQUIRE(s.p_inf == Catch::Approx(0.0).margin(1e-14));
        const SampledProfile want = steady_profile(1.0, 0.0, 0.5, 1.0, 400);
        for (int i = 0; i <= 400; ++i)
            REQUIRE(s.f_inf.values[i] == Catch::Approx(want.values[i]).margin(1e-14));
    }
    SECTION("mass round trip at an on-node limit price") {
        const SteadyState s = steady_state(MassPair{1.0, 0.5}, params, 400);
        REQUIRE(s.p_inf == Catch::Approx(0.25).margin(1e-14));
        const MassPair back = masses(s.f_inf, s.p_inf, params);
        REQUIRE(back.buyers == Catch::Approx(1.0).epsilon(1e-10));
        REQUIRE(back.vendors == Catch::Approx(0.5).epsilon(1e-10));
    }
    SECTION("ratio 6 is rejected") {
        REQUIRE_THROWS_AS(steady_state(MassPair{6.0, 1.0}, params, 400), NonexistenceError);
    }
}

TEST_CASE("nonexistence_check computes the admissibility interval", "[analysis]") {
    const ModelParams params = validate_params(1.0, 0.5, 0.0);
    const AdmissibilityCheck c = nonexistence_check(MassPair{1.0, 1.0}, params);
    REQUIRE(c.lo == Catch::Approx(0.2).epsilon(1e-15));
    REQUIRE(c.hi == Catch::Approx(5.0).epsilon(1e-15));
    REQUIRE(c.admissible);
    REQUIRE(c.p_inf == Catch::Approx(0.0).margin(1e-15));

    REQUIRE_FALSE(nonexistence_check(MassPair{6.0, 1.0}, params).admissible);

    std::mt19937 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const double L = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
        const double a = L * std::uniform_real_distribution<double>(0.1, 0.9)(rng);
        const ModelParams p = validate_params(L, a, 0.0);
        // ratio 1 is always admissible: a/(4L-3a) < 1 < (4L-3a)/a when a < L
        const double mass = std::uniform_real_distribution<double>(0.1, 5.0)(rng);
        REQUIRE(nonexistence_check(MassPair{mass, mass}, p).admissible);
    }
}

TEST_CASE("steady_state and nonexistence_check agree on a randomized sweep", "[analysis]") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        const double L = std::uniform_real_distribution<double>(0.5, 2.5)(rng);
        const double a = L * std::uniform_real_distribution<double>(0.1, 0.9)(rng);
        const double MB = std::uniform_real_distribution<double>(0.05, 4.0)(rng);
        const double MV = std::uniform_real_distribution<double>(0.05, 4.0)(rng);
        const ModelParams params = validate_params(L, a, 0.0);
        const AdmissibilityCheck c = nonexistence_check(MassPair{MB, MV}, params);
        bool threw = false;
        try {
            steady_state(MassPair{MB, MV}, params, 100);
        } catch (const NonexistenceError&) {
            threw = true;
        }
        REQUIRE(threw == !c.admissible);
    }
}

TEST_CASE("boundary_consistency ties the interval to the steady profile", "[analysis]") {
    const ModelParams params = validate_params(1.0, 0.5, 0.0);
    const auto [left, right] = boundary_consistency(params);
    REQUIRE(left == Catch::Approx(0.2).epsilon(1e-14));
    REQUIRE(right == Catch::Approx(5.0).epsilon(1e-14));
    REQUIRE(left * right == Catch::Approx(1.0).epsilon(1e-12));

    // independent route: integrate the steady profile parked at the endpoint
    const double a = params.a, L = params.L;
    const SampledProfile f_at_edge = steady_profile(1.0, L - a, a, L, 4000);
    const MassPair m = masses(f_at_edge, L - a, params);
    REQUIRE(m.buyers / m.vendors == Catch::Approx(right).epsilon(1e-10));

    // vanishing transaction cost opens the interval up to (0, inf)
    const auto [l2, r2] = boundary_consistency(validate_params(1.0, 1e-6, 0.0));
    REQUIRE(l2 < 1e-5);
    REQUIRE(r2 > 1e5);
}

TEST_CASE("measure_decay fits exponential envelopes", "[analysis]") {
    const ModelParams params = validate_params(1.0, 0.5, 0.0);
    const double w = 4.0 * pi / 3.0;  // omega2[1]
    const SampledProfile F_inf = make_profile(1.0, 400);

    SECTION("pure single-mode data give the exact rate") {
        std::vector<double> times;
        std::vector<SampledProfile> profiles;
        for (double t : {0.05, 0.1, 0.15, 0.2, 0.25}) {
            times.push_back(t);
            profiles.push_back(sample_function(1.0, 400, [&](double x) {
                return std::exp(-w * w * t) * std::sin(w * x);
            }));
        }
        const DecayFit fit = measure_decay(times, profiles, F_inf, params, 0.0);
        REQUIRE(fit.rate == Catch::Approx(w * w).margin(1e-8));
        REQUIRE(fit.fit_quality < 1e-10);
        REQUIRE(fit.points_used == 5);
    }
    SECTION("converged data are rejected") {
        std::vector<double> times = {0.1, 0.2, 0.3};
        std::vector<SampledProfile> profiles(3, F_inf);
        REQUIRE_THROWS_AS(measure_decay(times, profiles, F_inf, params, 0.0),
                          InsufficientDataError);
    }
    SECTION("the default window excludes early transients") {
        const DecayRates g = decay_rates(params, 2);
        const double expected = std::log(100.0) / (g.gamma[1] - g.gamma[0]);
        std::vector<double> times;
        std::vector<SampledProfile> profiles;
        for (int k = 1; k <= 12; ++k) {
            const double t = 0.05 * k;
            times.push_back(t);
            profiles.push_back(sample_function(1.0, 400, [&](double x) {
                return std::exp(-w * w * t) * std::sin(w * x);
            }));
        }
        const DecayFit fit = measure_decay(times, profiles, F_inf, params);
        REQUIRE(fit.window_start == Catch::Approx(expected).epsilon(1e-12));
        REQUIRE(fit.points_used < 12);
        REQUIRE(fit.rate == Catch::Approx(w * w).margin(1e-8));
    }
}

TEST_CASE("steady limits are consistent across modules", "[analysis]") {
    const ModelParams params = validate_params(1.0, 0.5, 0.0);
    const SteadyState s = steady_state(MassPair{1.0, 0.5}, params, 400);

    // inverse transform of the affine limit reproduces the plateau profile
    const SampledProfile f_back = inverse_transform(s.F_inf, params);
    for (int i = 0; i <= 400; ++i)
        REQUIRE(f_back.values[i] == Catch::Approx(s.f_inf.values[i]).margin(1e-12));

    // the zero of the affine limit is the limit price, exactly
    REQUIRE(locate_zero(s.F_inf).x == Catch::Approx(s.p_inf).margin(1e-13));
}
