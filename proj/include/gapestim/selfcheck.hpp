#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "gapestim/chain.hpp"
#include "gapestim/doubling.hpp"
#include "gapestim/hks.hpp"

namespace gapestim {

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace selfcheck {

// M(t1) <= epsilon across the oracle parameter grid with pi_star = 1/n. The
// derivation of t1 uses pi_star <= 1/n, so the check is exact on this grid.
inline SuiteResult t1_inequality_grid() {
    SuiteResult r{"t1-inequality-grid", true, ""};
    int cells = 0;
    double worst_ratio = 0.0;
    for (double gamma : {0.01, 0.1, 0.5}) {
        for (int n : {2, 10, 100}) {
            for (double delta : {0.05, 0.2}) {
                for (double eps : {0.05, 0.2}) {
                    const HksParams p{1.0, delta, n, 1.0 / n, gamma, eps};
                    ++cells;
                    const double m = error_bound_M(t1_steps(p), p);
                    worst_ratio = std::max(worst_ratio, m / eps);
                    if (!(m <= eps)) r.passed = false;
                }
            }
        }
    }
    r.detail = std::to_string(cells) + " cells, worst M(t1)/eps = " + std::to_string(worst_ratio);
    return r;
}

// Round trip between the skip transform and its inverse h. The x -> h -> skip
// direction is checked over the full grid. The gamma -> skip -> h direction is
// only well-conditioned while (1-gamma)^A stays well above the binary64
// resolution at 1: the skipped gap 1-(1-gamma)^A is rounded to ~1.1e-16, and
// inverting amplifies that absolute error by (1-gamma)^(1-A)/A. Keeping
// A*|log(1-gamma)| <= 9 keeps the amplified error below 1e-12; beyond
// A*|log(1-gamma)| ~ 37 the skipped gap rounds to exactly 1 and gamma is
// unrecoverable in principle. The doubling algorithm operates at
// A*gamma = O(1), far inside the safe region.
inline SuiteResult h_round_trip() {
    SuiteResult r{"h-round-trip", true, ""};
    double worst = 0.0;
    int cells = 0;
    for (int k = 0; k <= 20; ++k) {
        const std::uint64_t a = 1ULL << k;
        for (int i = 0; i <= 200; ++i) {
            const double x = 0.999 * i / 200.0;
            const double err = std::abs(skipped_gap(GapValue(back_transform_h(x, a)), a).gamma - x);
            worst = std::max(worst, err);
            ++cells;
            if (err > 1e-12) r.passed = false;
        }
        for (int i = 0; i <= 200; ++i) {
            const double gamma = 1e-4 * std::pow(0.99 / 1e-4, i / 200.0);
            if (static_cast<double>(a) * std::abs(std::log1p(-gamma)) > 9.0) continue;
            const double err =
                std::abs(back_transform_h(skipped_gap(GapValue(gamma), a).gamma, a) - gamma);
            worst = std::max(worst, err);
            ++cells;
            if (err > 1e-12) r.passed = false;
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%d cells, worst |error| = %.3e", cells, worst);
    r.detail = buf;
    return r;
}

// d/dx log h(x) stays below 11 on [0.29, 0.55] for every skip factor.
inline SuiteResult derivative_bound() {
    SuiteResult r{"log-h-derivative-bound", true, ""};
    double worst = 0.0;
    std::vector<std::uint64_t> factors;
    for (std::uint64_t a = 1; a <= 20; ++a) factors.push_back(a);
    for (int k = 5; k <= 15; ++k) factors.push_back(1ULL << k);
    for (std::uint64_t a : factors) {
        const double m = log_h_derivative_bound_check(a);
        worst = std::max(worst, m);
        if (!(m <= 11.0)) r.passed = false;
    }
    r.detail = std::to_string(factors.size()) + " skip factors, max derivative = " +
               std::to_string(worst);
    return r;
}

// skipped_gap(gamma, a) >= a*gamma/2 whenever a*gamma <= 1.
inline SuiteResult lemma_grid() {
    SuiteResult r{"skipped-gap-lower-bound", true, ""};
    int cells = 0;
    double worst_margin = 1.0;
    for (int i = 0; i < 100; ++i) {
        const double gamma = 1e-3 * std::pow(1000.0, i / 99.0);
        const auto a_max = static_cast<std::uint64_t>(std::min(1000.0, std::floor(1.0 / gamma)));
        for (std::uint64_t a = 1; a <= a_max; ++a) {
            if (static_cast<double>(a) * gamma > 1.0) continue;
            ++cells;
            const double lhs = skipped_gap(GapValue(gamma), a).gamma;
            const double rhs = 0.5 * static_cast<double>(a) * gamma;
            worst_margin = std::min(worst_margin, lhs - rhs);
            if (lhs < rhs) r.passed = false;
        }
    }
    r.detail = std::to_string(cells) + " cells, min margin = " + std::to_string(worst_margin);
    return r;
}

} // namespace selfcheck

inline std::vector<SuiteResult> run_selfchecks() {
    return {selfcheck::t1_inequality_grid(), selfcheck::h_round_trip(),
            selfcheck::derivative_bound(), selfcheck::lemma_grid()};
}

} // namespace gapestim
