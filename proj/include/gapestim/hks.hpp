#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gapestim/linalg.hpp"
#include "gapestim/trajectory.hpp"

namespace gapestim {

// Transition counts of an observed path: counts(i,j) = #{s : X_s = i, X_{s+1} = j}.
// visit_counts are the row sums, i.e. visits over X_0 ... X_{t-1}.
struct EmpiricalModel {
    int n = 0;
    std::int64_t t = 0;
    std::vector<std::int64_t> counts;       // n*n, row-major
    std::vector<std::int64_t> visit_counts; // length n

    std::int64_t count(int i, int j) const { return counts[static_cast<std::size_t>(i) * n + j]; }

    static EmpiricalModel build(const Trajectory& tr, int n) {
        if (n < 1) throw InvalidParameterError("state-space size must be >= 1");
        if (tr.length() < 2) throw InvalidParameterError("need at least one transition");
        EmpiricalModel m;
        m.n = n;
        m.t = tr.transitions();
        m.counts.assign(static_cast<std::size_t>(n) * n, 0);
        m.visit_counts.assign(n, 0);
        for (std::int64_t s = 0; s < m.t; ++s) {
            const std::int32_t from = tr.states[static_cast<std::size_t>(s)];
            const std::int32_t to = tr.states[static_cast<std::size_t>(s + 1)];
            if (from < 0 || from >= n || to < 0 || to >= n)
                throw ValidationError("state index outside [0, n) in trajectory");
            ++m.counts[static_cast<std::size_t>(from) * n + to];
            ++m.visit_counts[from];
        }
        return m;
    }
};

// Point estimate of a spectral gap from one trajectory.
struct GapEstimate {
    double gamma_hat = 0.0;
    std::int64_t t_used = 0;
    std::uint64_t skip = 1;
    bool clamped = false;
    int unvisited_states = 0;
};

// Parameters of the finite-sample error bound. gamma and pi_star are oracle
// quantities, so the bound is only evaluable when the chain is known. C is the
// absolute constant of the bound; it is a free configuration knob (default 1)
// because no explicit value is available for it.
struct HksParams {
    double C = 1.0;
    double delta = 0.1;
    int n = 2;
    double pi_star = 0.5;
    double gamma = 0.5;
    double epsilon = 0.1;

    void validate() const {
        if (!(C > 0.0)) throw InvalidParameterError("C must be positive");
        if (!(delta > 0.0 && delta < 1.0)) throw InvalidParameterError("delta must lie in (0, 1)");
        if (n < 1) throw InvalidParameterError("n must be >= 1");
        if (!(pi_star > 0.0 && pi_star <= 1.0))
            throw InvalidParameterError("pi_star must lie in (0, 1]");
        if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidParameterError("gamma must lie in (0, 1]");
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw InvalidParameterError("epsilon must lie in (0, 1)");
    }
};

// Plug-in gap estimator: with pi_hat the visit fractions and Q_hat = counts/t,
// form L_hat = D^{-1/2} Q_hat D^{-1/2} on the visited states (entries
// counts(i,j)/sqrt(N_i N_j)), symmetrize, and take 1 - lambda_2. States with
// no outgoing observation are dropped; the result is clamped to [0, 1].
inline GapEstimate estimate_gap(const Trajectory& tr, int n) {
    const EmpiricalModel m = EmpiricalModel::build(tr, n);

    std::vector<int> support;
    support.reserve(n);
    for (int i = 0; i < n; ++i)
        if (m.visit_counts[i] > 0) support.push_back(i);

    const int k = static_cast<int>(support.size());
    if (k < 2)
        throw DegenerateDataError("trajectory visits fewer than 2 states; gap estimate undefined");

    DenseMatrix l_hat(k);
    for (int a = 0; a < k; ++a) {
        const double na = static_cast<double>(m.visit_counts[support[a]]);
        for (int b = 0; b < k; ++b) {
            const double nb = static_cast<double>(m.visit_counts[support[b]]);
            l_hat(a, b) = static_cast<double>(m.count(support[a], support[b])) / std::sqrt(na * nb);
        }
    }

    const std::vector<double> eig = symmetric_eigenvalues(l_hat.symmetrized(), 1e-10);

    GapEstimate est;
    est.t_used = m.t;
    est.skip = 1;
    est.unvisited_states = n - k;
    const double raw = 1.0 - eig[1];
    est.gamma_hat = raw;
    if (raw < 0.0) {
        est.gamma_hat = 0.0;
        est.clamped = true;
    } else if (raw > 1.0) {
        est.gamma_hat = 1.0;
        est.clamped = true;
    }
    return est;
}

// Deviation bound M(t; delta, pi, gamma) for the plug-in estimator:
//   C * ( sqrt( log(n/delta) * log(t/(pi_star*delta)) / (pi_star*gamma*t) )
//         + log(1/gamma) / (gamma*t) ).
// Natural logarithms throughout.
inline double error_bound_M(std::int64_t t, const HksParams& p) {
    p.validate();
    if (t < 2) throw InvalidParameterError("error bound needs t >= 2");
    const double td = static_cast<double>(t);
    const double sqrt_term =
        std::sqrt(std::log(p.n / p.delta) * std::log(td / (p.pi_star * p.delta)) /
                  (p.pi_star * p.gamma * td));
    const double tail_term = std::log(1.0 / p.gamma) / (p.gamma * td);
    return p.C * (sqrt_term + tail_term);
}

// Steps sufficient for M(t) <= epsilon:
//   t1 = ceil( (1/(pi_star*gamma)) * 12 C^2 log(n/delta)
//              * log(12 C^2 / (eps^2 pi_star^2 gamma delta)) / eps^2 ).
inline std::int64_t t1_steps(const HksParams& p) {
    p.validate();
    const double c2 = p.C * p.C;
    const double eps2 = p.epsilon * p.epsilon;
    const double inner = 12.0 * c2 / (eps2 * p.pi_star * p.pi_star * p.gamma * p.delta);
    const double value = (1.0 / (p.pi_star * p.gamma)) * 12.0 * c2 * std::log(p.n / p.delta) *
                         std::log(inner) / eps2;
    if (!(value >= 0.0) || value > 9.0e18)
        throw InvalidParameterError("t1 evaluates outside the representable range");
    return static_cast<std::int64_t>(std::ceil(value));
}

// Self-check that the closed-form t1 really drives the bound below epsilon.
// Expected to hold whenever pi_star <= 1/n.
inline bool verify_t1_inequality(const HksParams& p) {
    return error_bound_M(t1_steps(p), p) <= p.epsilon;
}

} // namespace gapestim
