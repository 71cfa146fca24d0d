#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gapestim/hks.hpp"
#include "gapestim/trajectory.hpp"

namespace gapestim {

// Knobs of the skip-doubling estimator. The stopping threshold 0.31 and the
// band [0.30, 0.54] it certifies for the selected skipped gap are fixed by
// the analysis; they are configurable only for experiments. min_skipped_length
// bounds the data-driven level cap: level k is only attempted while
// floor(t / 2^k) >= min_skipped_length, so estimates never run on vanishingly
// short subsequences.
struct DoublingConfig {
    double threshold_stop = 0.31;
    double band_low = 0.30;
    double band_high = 0.54;
    double epsilon = 0.1;
    double delta = 0.1;
    double C = 1.0;
    int max_k = 62;
    std::int64_t min_skipped_length = 100;

    void validate() const {
        if (!(band_low > 0.0 && band_low < threshold_stop && threshold_stop < band_high &&
              band_high < 1.0))
            throw InvalidParameterError("need 0 < band_low < threshold_stop < band_high < 1");
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw InvalidParameterError("epsilon must lie in (0, 1)");
        if (!(delta > 0.0 && delta < 1.0)) throw InvalidParameterError("delta must lie in (0, 1)");
        if (!(C > 0.0)) throw InvalidParameterError("C must be positive");
        if (max_k < 0) throw InvalidParameterError("max_k must be >= 0");
        if (min_skipped_length < 1)
            throw InvalidParameterError("min_skipped_length must be >= 1");
    }

    // The analysis behind the multiplicative guarantee needs per-level errors
    // below 0.01, i.e. epsilon/22 < 0.01.
    bool epsilon_in_guarantee_regime() const { return epsilon < 0.22; }
};

struct LevelEstimate {
    int k = 0;
    std::uint64_t a = 1;
    std::int64_t steps_used = 0;
    double gamma_hat = 0.0;
};

struct DoublingResult {
    std::uint64_t A = 1;
    std::vector<LevelEstimate> per_level;
    std::optional<double> gamma_tilde;
    bool terminated_normally = false;
    std::string warning; // empty when none

    const LevelEstimate& stopping_level() const { return per_level.back(); }
};

// K = floor(log2(1/gamma)).
inline int floor_log2_inverse(double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidParameterError("gamma must lie in (0, 1]");
    return static_cast<int>(std::floor(std::log2(1.0 / gamma)));
}

// delta_gamma = delta / (floor(log2(1/gamma)) + 1): the confidence budget is
// split evenly across the levels the doubling search can visit.
inline double delta_split(double delta, double gamma) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidParameterError("delta must lie in (0, 1)");
    return delta / (floor_log2_inverse(gamma) + 1);
}

// h(x) = 1 - (1-x)^{1/A}, the inverse of x -> 1 - (1-x)^A. h(1) = 1 by
// continuous extension; x > 1 has no preimage.
inline double back_transform_h(double x, std::uint64_t A) {
    if (A < 1) throw InvalidParameterError("skip factor must be >= 1");
    if (x < 0.0 || x > 1.0)
        throw InvalidParameterError("back transform input must lie in [0, 1]");
    if (x == 1.0) return 1.0;
    return -std::expm1(std::log1p(-x) / static_cast<double>(A));
}

// Doubling search for the skip factor: estimate the gap of the skipped chain
// at a = 2^k for k = 0, 1, ... and stop at the first estimate above
// threshold_stop. Hitting the level cap first yields terminated_normally =
// false and a warning; with too little data there is no sensible estimate.
inline DoublingResult select_skip(const Trajectory& tr, int n, const DoublingConfig& cfg) {
    cfg.validate();
    const std::int64_t t = tr.transitions();
    if (t < 1) throw InvalidParameterError("trajectory has no transitions");

    DoublingResult result;
    for (int k = 0;; ++k) {
        const std::uint64_t a = 1ULL << k;
        const Trajectory sub = skip(tr, a);
        const GapEstimate est = estimate_gap(sub, n);
        result.per_level.push_back({k, a, sub.transitions(), est.gamma_hat});

        if (est.gamma_hat > cfg.threshold_stop) {
            result.A = a;
            result.terminated_normally = true;
            return result;
        }

        const bool next_below_cap = k + 1 <= cfg.max_k &&
                                    (t >> (k + 1)) >= cfg.min_skipped_length;
        if (!next_below_cap) {
            result.A = a;
            result.terminated_normally = false;
            result.warning = "level cap reached at a=" + std::to_string(a) +
                             " before any estimate exceeded " +
                             std::to_string(cfg.threshold_stop) +
                             "; trajectory too short for a reliable estimate";
            return result;
        }
    }
}

// Full estimator: pick A by doubling, then map the stopping-level estimate
// back through h. The stopping-level estimate is reused as-is; all levels are
// read from the one observed trajectory.
inline DoublingResult estimate_gamma(const Trajectory& tr, int n, const DoublingConfig& cfg) {
    DoublingResult result = select_skip(tr, n, cfg);
    const double gh = result.stopping_level().gamma_hat;
    double gt = back_transform_h(std::min(gh, 1.0), result.A);
    if (gt < 0.0) gt = 0.0;
    if (gt > 1.0) gt = 1.0;
    result.gamma_tilde = gt;
    return result;
}

// L factor of the sufficient-sample-size formula, with C0 = 23232 * C:
//   L = log( C0*(K+1) / (eps^2 pi_star^2 gamma delta) ) * log( n*(K+1)/delta ),
// K = floor(log2(1/gamma)).
inline double compute_L(double epsilon, double delta, double gamma, double pi_star, int n,
                        double C) {
    HksParams check{C, delta, n, pi_star, gamma, epsilon};
    check.validate();
    const double c0 = 23232.0 * C;
    const double levels = static_cast<double>(floor_log2_inverse(gamma) + 1);
    const double first = std::log(c0 * levels /
                                  (epsilon * epsilon * pi_star * pi_star * gamma * delta));
    const double second = std::log(n * levels / delta);
    return first * second;
}

// t0 = ceil( (1/(pi_star*gamma)) * (C0/eps^2) * L ). Algebraically equal to
// t1(eps/44; delta_gamma, gamma) when C = 1.
inline std::int64_t t0_steps(double epsilon, double delta, double gamma, double pi_star, int n,
                             double C) {
    const double l = compute_L(epsilon, delta, gamma, pi_star, n, C);
    const double c0 = 23232.0 * C;
    const double value = (1.0 / (pi_star * gamma)) * (c0 / (epsilon * epsilon)) * l;
    if (!(value >= 0.0) || value > 9.0e18)
        throw InvalidParameterError("t0 evaluates outside the representable range");
    return static_cast<std::int64_t>(std::ceil(value));
}

// Max of (d/dx) log h(x) over x in [0.29, 0.55] on a 1e-4 grid, using the
// closed form (1/(1-(1-x)^{1/A})) * (1/A) * (1-x)^{1/A - 1}. The analysis
// bounds this by 11 uniformly in A.
inline double log_h_derivative_bound_check(std::uint64_t A) {
    if (A < 1) throw InvalidParameterError("skip factor must be >= 1");
    const double inv_a = 1.0 / static_cast<double>(A);
    double worst = 0.0;
    const int steps = static_cast<int>(std::llround((0.55 - 0.29) / 1e-4));
    for (int i = 0; i <= steps; ++i) {
        const double x = 0.29 + 1e-4 * i;
        const double pow_full = std::pow(1.0 - x, inv_a);
        const double h = -std::expm1(inv_a * std::log1p(-x));
        const double deriv = (1.0 / h) * inv_a * pow_full / (1.0 - x);
        worst = std::max(worst, deriv);
    }
    return worst;
}

} // namespace gapestim
