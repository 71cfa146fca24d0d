#include <doctest.h>

#include <cmath>
#include <vector>

#include "gapestim/doubling.hpp"
#include "gapestim/selfcheck.hpp"

using namespace gapestim;

namespace {

Trajectory manual_trajectory(std::vector<std::int32_t> states, int n) {
    Trajectory tr;
    tr.states = std::move(states);
    tr.n = n;
    return tr;
}

} // namespace

TEST_CASE("back_transform_h: identity at A = 1") {
    for (double x : {0.0, 0.1, 0.31, 0.9}) CHECK(back_transform_h(x, 1) == doctest::Approx(x));
}

TEST_CASE("back_transform_h: inverse of the skip transform") {
    CHECK(back_transform_h(0.3439, 4) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(back_transform_h(skipped_gap(GapValue(0.1), 4).gamma, 4) ==
          doctest::Approx(0.1).epsilon(1e-13));
}

TEST_CASE("back_transform_h: boundary and invalid input") {
    CHECK(back_transform_h(1.0, 8) == 1.0);
    CHECK(back_transform_h(0.0, 8) == 0.0);
    CHECK_THROWS_AS((void)back_transform_h(1.0000001, 8), InvalidParameterError);
    CHECK_THROWS_AS((void)back_transform_h(-0.1, 8), InvalidParameterError);
    CHECK_THROWS_AS((void)back_transform_h(0.5, 0), InvalidParameterError);
}

TEST_CASE("h round trip suite passes") {
    const auto suite = selfcheck::h_round_trip();
    INFO(suite.detail);
    CHECK(suite.passed);
}

TEST_CASE("delta_split") {
    CHECK(delta_split(0.1, 1.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(delta_split(0.1, 0.05) == doctest::Approx(0.02).epsilon(1e-15));
    for (double delta : {0.05, 0.1, 0.3}) {
        for (double gamma : {1.0, 0.5, 0.3, 0.05, 0.01}) {
            const int levels = floor_log2_inverse(gamma) + 1;
            CHECK(levels * delta_split(delta, gamma) == doctest::Approx(delta).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS((void)delta_split(0.0, 0.5), InvalidParameterError);
    CHECK_THROWS_AS((void)delta_split(0.1, 0.0), InvalidParameterError);
}

TEST_CASE("floor_log2_inverse") {
    CHECK(floor_log2_inverse(1.0) == 0);
    CHECK(floor_log2_inverse(0.5) == 1);
    CHECK(floor_log2_inverse(0.05) == 4); // floor(log2 20)
    CHECK(floor_log2_inverse(0.25) == 2);
}

TEST_CASE("compute_L: gamma = 1 uses a single-level budget") {
    const double eps = 0.1, delta = 0.1, pi_star = 0.5;
    const int n = 2;
    const double expected = std::log(23232.0 / (eps * eps * pi_star * pi_star * delta)) *
                            std::log(n / delta);
    CHECK(compute_L(eps, delta, 1.0, pi_star, n, 1.0) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("compute_L: nondecreasing as gamma shrinks") {
    double prev = 0.0;
    for (double gamma : {0.9, 0.5, 0.2, 0.1, 0.05, 0.01, 0.001}) {
        const double l = compute_L(0.1, 0.1, gamma, 0.01, 50, 1.0);
        CHECK(l >= prev);
        prev = l;
    }
}

TEST_CASE("t0_steps: frozen value at the reference point") {
    // ceil( 4 * (23232/0.01) * ln(46464/1.25e-4) * ln(40) ), recomputed independently.
    CHECK(t0_steps(0.1, 0.1, 0.5, 0.5, 2, 1.0) == 676469209);
}

TEST_CASE("t0_steps: grows as gamma or pi_star shrink") {
    CHECK(t0_steps(0.1, 0.1, 0.05, 0.5, 2, 1.0) > t0_steps(0.1, 0.1, 0.5, 0.5, 2, 1.0));
    CHECK(t0_steps(0.1, 0.1, 0.5, 0.05, 2, 1.0) > t0_steps(0.1, 0.1, 0.5, 0.5, 2, 1.0));
}

TEST_CASE("t0_steps equals t1_steps(eps/44, delta_gamma) for C = 1") {
    for (double eps : {0.05, 0.1, 0.2}) {
        for (double delta : {0.05, 0.1}) {
            for (double gamma : {0.01, 0.1, 0.5, 0.9}) {
                for (int n : {2, 10, 100}) {
                    const double pi_star = 1.0 / n;
                    const std::int64_t t0 = t0_steps(eps, delta, gamma, pi_star, n, 1.0);
                    const HksParams p{1.0, delta_split(delta, gamma), n, pi_star, gamma,
                                      eps / 44.0};
                    const std::int64_t t1 = t1_steps(p);
                    CHECK(std::llabs(t0 - t1) <= 1);
                }
            }
        }
    }
}

TEST_CASE("log_h_derivative_bound_check: closed form at A = 1, bounded by 11") {
    CHECK(log_h_derivative_bound_check(1) == doctest::Approx(1.0 / 0.29).epsilon(1e-9));
    for (std::uint64_t a : {1ULL, 2ULL, 8ULL, 1024ULL})
        CHECK(log_h_derivative_bound_check(a) <= 11.0);
    const auto suite = selfcheck::derivative_bound();
    INFO(suite.detail);
    CHECK(suite.passed);
}

TEST_CASE("relative-error transfer: eps/22 perturbations stay within eps") {
    for (double gamma_a : {0.30, 0.42, 0.54}) {
        for (std::uint64_t a : {2ULL, 32ULL, 1024ULL}) {
            const double gamma = back_transform_h(gamma_a, a);
            for (double eps : {0.001, 0.02, 0.2}) {
                for (double sign : {-1.0, 1.0}) {
                    const double estimate = gamma_a + sign * eps / 22.0;
                    const double transformed = back_transform_h(estimate, a);
                    CHECK(std::abs(transformed / gamma - 1.0) <= eps);
                }
            }
        }
    }
}

TEST_CASE("DoublingConfig validation") {
    DoublingConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.threshold_stop == 0.31);
    CHECK(cfg.band_low == 0.30);
    CHECK(cfg.band_high == 0.54);
    CHECK(cfg.epsilon_in_guarantee_regime());

    DoublingConfig bad = cfg;
    bad.band_low = 0.32;
    CHECK_THROWS_AS(bad.validate(), InvalidParameterError);
    bad = cfg;
    bad.min_skipped_length = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidParameterError);
    bad = cfg;
    bad.epsilon = 0.5;
    CHECK_NOTHROW(bad.validate());
    CHECK(!bad.epsilon_in_guarantee_regime());
}

TEST_CASE("select_skip: fast chain stops at A = 1") {
    const auto c = make_two_state(0.25, 0.25);
    const DoublingConfig cfg;
    int a_one = 0;
    for (int s = 0; s < 30; ++s) {
        const auto tr = simulate(c, 10000, 900 + static_cast<std::uint64_t>(s));
        const auto res = select_skip(tr, 2, cfg);
        CHECK(res.terminated_normally);
        if (res.A == 1) ++a_one;
    }
    CHECK(a_one == 30);
}

TEST_CASE("select_skip: hard cap max_k stops the search with a warning") {
    const auto c = make_two_state(0.005, 0.005); // gap 0.01, far below the threshold
    DoublingConfig cfg;
    cfg.max_k = 0;
    const auto tr = simulate(c, 20000, 44);
    const auto res = select_skip(tr, 2, cfg);
    CHECK(!res.terminated_normally);
    CHECK(res.A == 1);
    CHECK(res.per_level.size() == 1);
    CHECK(!res.warning.empty());
}

TEST_CASE("select_skip: min_skipped_length bounds the level count") {
    const auto c = make_lazy_cycle(30);
    DoublingConfig cfg;
    cfg.min_skipped_length = 1000;
    const auto tr = simulate(c, 3000, 7);
    const auto res = select_skip(tr, 30, cfg);
    // levels 0 and 1 fit (3000 and 1500 skipped transitions); level 2 would
    // drop to 750 < 1000.
    CHECK(!res.terminated_normally);
    CHECK(res.per_level.size() == 2);
    CHECK(res.A == 2);
}

TEST_CASE("select_skip: degenerate data at level 0 propagates") {
    const auto tr = manual_trajectory({0, 0}, 30);
    CHECK_THROWS_AS((void)select_skip(tr, 30, DoublingConfig{}), DegenerateDataError);
}

TEST_CASE("estimate_gamma: final estimate is h of the stopping-level estimate") {
    const auto c = make_lazy_cycle(12);
    const auto tr = simulate(c, 200000, 11);
    const auto res = estimate_gamma(tr, 12, DoublingConfig{});
    REQUIRE(res.gamma_tilde.has_value());
    const double expected = back_transform_h(res.stopping_level().gamma_hat, res.A);
    CHECK(*res.gamma_tilde == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("estimate_gamma: recovers a small gap from one long trajectory") {
    const auto c = make_lazy_cycle(30);
    const double gamma = exact_gap(c).gamma;
    const auto tr = simulate(c, 1000000, 31);
    const auto res = estimate_gamma(tr, 30, DoublingConfig{});
    REQUIRE(res.gamma_tilde.has_value());
    CHECK(res.terminated_normally);
    CHECK(std::abs(*res.gamma_tilde / gamma - 1.0) < 0.3);
}

TEST_CASE("estimate_gamma: complete graph stops immediately near 1") {
    const auto c = make_complete_graph(5);
    const auto tr = simulate(c, 10000, 13);
    const auto res = estimate_gamma(tr, 5, DoublingConfig{});
    CHECK(res.A == 1);
    REQUIRE(res.gamma_tilde.has_value());
    CHECK(*res.gamma_tilde >= 0.9);
    CHECK(*res.gamma_tilde <= 1.0);
}
