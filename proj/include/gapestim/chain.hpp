#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gapestim/linalg.hpp"
#include "gapestim/rng.hpp"

namespace gapestim {

// Spectral gap, always in [0, 1].
struct GapValue {
    double gamma;

    explicit GapValue(double g) : gamma(g) {
        if (!(g >= 0.0 && g <= 1.0)) throw InvalidParameterError("gap must lie in [0, 1]");
    }
};

// Reversible row-stochastic chain with cached stationary distribution and the
// spectrum of the symmetrized kernel D^{1/2} P D^{-1/2}. Reversibility makes
// that kernel symmetric with the same spectrum as P, so the gap comes from a
// symmetric eigensolve. Immutable after construction.
class MarkovChain {
public:
    // Validates row-stochasticity, detailed balance against pi, and that the
    // symmetrized kernel has no eigenvalue below -1e-10 (chains with
    // eigenvalues near -1 are out of scope). detailed_balance_tol is 1e-10
    // for generated chains and 1e-8 for chains loaded from files.
    static MarkovChain create(DenseMatrix P, std::vector<double> pi, std::string label,
                              double detailed_balance_tol = 1e-10, double row_tol = 1e-10) {
        const int n = P.n();
        if (n < 2) throw InvalidParameterError("chain needs at least 2 states");
        if (static_cast<int>(pi.size()) != n)
            throw InvalidParameterError("stationary vector length mismatch");
        detail::check_row_stochastic(P, row_tol);

        double pi_sum = 0.0;
        double pi_star = 1.0;
        for (double v : pi) {
            if (v <= 0.0) throw ValidationError("stationary distribution must be strictly positive");
            pi_sum += v;
            pi_star = std::min(pi_star, v);
        }
        if (std::abs(pi_sum - 1.0) > 1e-10)
            throw ValidationError("stationary distribution must sum to 1");

        double db_residual = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                db_residual = std::max(db_residual, std::abs(pi[i] * P(i, j) - pi[j] * P(j, i)));
        if (db_residual > detailed_balance_tol)
            throw ValidationError("detailed balance residual " + std::to_string(db_residual) +
                                  " exceeds tolerance; chain is not reversible");

        // Symmetrized kernel S_ij = sqrt(pi_i) P_ij / sqrt(pi_j), averaged to
        // kill the O(residual) asymmetry before the eigensolve.
        DenseMatrix sym(n);
        std::vector<double> sqrt_pi(n);
        for (int i = 0; i < n; ++i) sqrt_pi[i] = std::sqrt(pi[i]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) sym(i, j) = sqrt_pi[i] * P(i, j) / sqrt_pi[j];
        std::vector<double> spectrum = symmetric_eigenvalues(sym.symmetrized(), 1e-12);

        if (spectrum.back() < -1e-10)
            throw ValidationError("symmetrized kernel has eigenvalue " +
                                  std::to_string(spectrum.back()) +
                                  "; chains must be positive semidefinite");

        return MarkovChain(std::move(P), std::move(pi), pi_star, std::move(spectrum),
                           db_residual, std::move(label));
    }

    int n() const { return kernel_.n(); }
    const DenseMatrix& kernel() const { return kernel_; }
    const std::vector<double>& pi() const { return pi_; }
    double pi_star() const { return pi_star_; }
    const std::vector<double>& spectrum() const { return spectrum_; }
    double detailed_balance_residual() const { return db_residual_; }
    const std::string& label() const { return label_; }

private:
    MarkovChain(DenseMatrix P, std::vector<double> pi, double pi_star,
                std::vector<double> spectrum, double db_residual, std::string label)
        : kernel_(std::move(P)), pi_(std::move(pi)), pi_star_(pi_star),
          spectrum_(std::move(spectrum)), db_residual_(db_residual), label_(std::move(label)) {}

    DenseMatrix kernel_;
    std::vector<double> pi_;
    double pi_star_;
    std::vector<double> spectrum_; // descending eigenvalues of the symmetrized kernel
    double db_residual_;
    std::string label_;
};

// gamma = 1 - lambda_2.
inline GapValue exact_gap(const MarkovChain& c) {
    const double lambda2 = c.spectrum()[1];
    double g = 1.0 - lambda2;
    if (g < 0.0) g = 0.0;
    if (g > 1.0) g = 1.0;
    return GapValue(g);
}

// Gap of the a-step chain: gamma_a = 1 - (1 - gamma)^a.
inline GapValue skipped_gap(GapValue gamma, std::uint64_t a) {
    if (a < 1) throw InvalidParameterError("skip factor must be >= 1");
    if (gamma.gamma == 1.0) return GapValue(1.0);
    const double log1m = std::log1p(-gamma.gamma);
    double g = -std::expm1(static_cast<double>(a) * log1m);
    if (g < 0.0) g = 0.0;
    if (g > 1.0) g = 1.0;
    return GapValue(g);
}

// Chain with kernel P^a and the same stationary distribution.
inline MarkovChain skip_chain(const MarkovChain& c, std::uint64_t a) {
    if (a < 1) throw InvalidParameterError("skip factor must be >= 1");
    if (a == 1) return c;
    DenseMatrix powered = matrix_power(c.kernel(), a);
    return MarkovChain::create(std::move(powered), c.pi(),
                               c.label() + "^" + std::to_string(a), 1e-9);
}

inline MarkovChain make_two_state(double p, double q) {
    if (!(p > 0.0) || !(q > 0.0) || !(p + q <= 1.0))
        throw InvalidParameterError("two-state chain requires p, q > 0 and p + q <= 1");
    DenseMatrix P = DenseMatrix::from_rows({{1.0 - p, p}, {q, 1.0 - q}});
    std::vector<double> pi{q / (p + q), p / (p + q)};
    return MarkovChain::create(std::move(P), std::move(pi),
                               "two-state(p=" + std::to_string(p) + ",q=" + std::to_string(q) + ")");
}

// Lazy random walk on the n-cycle: P = I/2 + (S + S^-1)/4. Uniform pi,
// eigenvalues (1 + cos(2 pi j / n)) / 2 >= 0, gap (1 - cos(2 pi / n)) / 2.
inline MarkovChain make_lazy_cycle(int n) {
    if (n < 3) throw InvalidParameterError("lazy cycle requires n >= 3");
    DenseMatrix P(n);
    for (int i = 0; i < n; ++i) {
        P(i, i) = 0.5;
        P(i, (i + 1) % n) += 0.25;
        P(i, (i + n - 1) % n) += 0.25;
    }
    std::vector<double> pi(n, 1.0 / n);
    return MarkovChain::create(std::move(P), std::move(pi), "lazy-cycle(n=" + std::to_string(n) + ")");
}

inline MarkovChain make_complete_graph(int n) {
    if (n < 2) throw InvalidParameterError("complete-graph chain requires n >= 2");
    DenseMatrix P(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) P(i, j) = 1.0 / n;
    std::vector<double> pi(n, 1.0 / n);
    return MarkovChain::create(std::move(P), std::move(pi), "complete(n=" + std::to_string(n) + ")");
}

// Reversible chain from a symmetric positive weight matrix: P' is the
// row-normalization of W, pi is proportional to the row sums of W, and
// laziness >= 1/2 shifts the spectrum into [2*laziness - 1, 1].
inline MarkovChain make_reversible_from_weights(const DenseMatrix& W, double laziness,
                                                const std::string& label) {
    const int n = W.n();
    if (n < 2) throw InvalidParameterError("weight matrix needs n >= 2");
    if (!(laziness >= 0.5 && laziness < 1.0))
        throw InvalidParameterError("laziness must lie in [0.5, 1)");
    if (W.max_asymmetry() > 0.0) throw InvalidParameterError("weight matrix must be symmetric");

    std::vector<double> row_sums = W.row_sums();
    double total = 0.0;
    for (double r : row_sums) {
        if (r <= 0.0) throw InvalidParameterError("weight matrix rows must have positive mass");
        total += r;
    }
    DenseMatrix P(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) P(i, j) = (1.0 - laziness) * W(i, j) / row_sums[i];
        P(i, i) += laziness;
    }
    std::vector<double> pi(n);
    for (int i = 0; i < n; ++i) pi[i] = row_sums[i] / total;
    // Renormalize away the last-digit rounding of the division.
    double s = 0.0;
    for (double v : pi) s += v;
    for (double& v : pi) v /= s;
    return MarkovChain::create(std::move(P), std::move(pi), label);
}

// Random reversible test chain. Weights are drawn uniformly from [0.1, 1)
// for i <= j (upper triangle, row by row) and mirrored, so the construction
// is deterministic given the seed.
inline MarkovChain make_random_reversible(int n, std::uint64_t seed, double laziness = 0.75) {
    if (n < 2) throw InvalidParameterError("random reversible chain requires n >= 2");
    if (!(laziness >= 0.5 && laziness < 1.0))
        throw InvalidParameterError("laziness must lie in [0.5, 1)");
    Xoshiro256PlusPlus rng(seed);
    DenseMatrix W(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double w = 0.1 + 0.9 * rng.next_double();
            W(i, j) = w;
            W(j, i) = w;
        }
    }
    return make_reversible_from_weights(
        W, laziness, "random-reversible(n=" + std::to_string(n) + ",seed=" + std::to_string(seed) + ")");
}

} // namespace gapestim
