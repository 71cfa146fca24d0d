#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "gapestim/errors.hpp"

namespace gapestim {

// Dense real square matrix, row-major. Small dimensions only (n up to a few
// hundred); everything downstream assumes entries are finite.
class DenseMatrix {
public:
    explicit DenseMatrix(int n) : n_(check_dim(n)), data_(static_cast<std::size_t>(n) * n, 0.0) {}

    DenseMatrix(int n, std::vector<double> entries) : n_(check_dim(n)), data_(std::move(entries)) {
        if (data_.size() != static_cast<std::size_t>(n_) * n_)
            throw InvalidParameterError("entry count does not match dimension");
        for (double v : data_)
            if (!std::isfinite(v)) throw InvalidParameterError("matrix entries must be finite");
    }

    static DenseMatrix identity(int n) {
        DenseMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        const int n = static_cast<int>(rows.size());
        std::vector<double> entries;
        entries.reserve(static_cast<std::size_t>(n) * n);
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != n)
                throw InvalidParameterError("matrix rows must all have length n");
            entries.insert(entries.end(), row.begin(), row.end());
        }
        return DenseMatrix(n, std::move(entries));
    }

    int n() const { return n_; }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }

    const std::vector<double>& data() const { return data_; }

    double trace() const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += (*this)(i, i);
        return s;
    }

    double max_asymmetry() const {
        double worst = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
        return worst;
    }

    DenseMatrix symmetrized() const {
        DenseMatrix out(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                out(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
        return out;
    }

    std::vector<double> row_sums() const {
        std::vector<double> sums(n_, 0.0);
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (int j = 0; j < n_; ++j) s += (*this)(i, j);
            sums[i] = s;
        }
        return sums;
    }

private:
    static int check_dim(int n) {
        if (n < 1) throw InvalidParameterError("matrix dimension must be >= 1");
        return n;
    }

    int n_;
    std::vector<double> data_;
};

inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.n() != b.n()) throw InvalidParameterError("dimension mismatch in matrix multiply");
    const int n = a.n();
    DenseMatrix out(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

// Repeated squaring; a >= 1.
inline DenseMatrix matrix_power(const DenseMatrix& m, std::uint64_t a) {
    if (a < 1) throw InvalidParameterError("matrix power exponent must be >= 1");
    DenseMatrix base = m;
    DenseMatrix result = DenseMatrix::identity(m.n());
    bool started = false;
    while (a > 0) {
        if (a & 1ULL) {
            result = started ? multiply(result, base) : base;
            started = true;
        }
        a >>= 1;
        if (a > 0) base = multiply(base, base);
    }
    return result;
}

// All eigenvalues of a symmetric matrix, sorted descending, via cyclic Jacobi
// rotations. Each returned value is within tol of a true eigenvalue once the
// off-diagonal Frobenius norm drops below tol.
inline std::vector<double> symmetric_eigenvalues(const DenseMatrix& m, double tol = 1e-10) {
    if (tol <= 0.0) throw InvalidParameterError("tolerance must be positive");
    const int n = m.n();
    const double asym = m.max_asymmetry();
    if (asym > tol)
        throw NotSymmetricError("matrix asymmetry " + std::to_string(asym) + " exceeds tolerance");

    DenseMatrix a = m.symmetrized();
    if (n == 1) return {a(0, 0)};

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const double off = off_norm();
        if (off <= tol) {
            std::vector<double> eig(n);
            for (int i = 0; i < n; ++i) eig[i] = a(i, i);
            std::sort(eig.begin(), eig.end(), std::greater<double>());
            return eig;
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // Row/column rotation on the symmetric matrix.
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }
    throw NoConvergenceError("Jacobi eigenvalue iteration failed to reach tolerance");
}

namespace detail {

inline void check_row_stochastic(const DenseMatrix& m, double tol) {
    const int n = m.n();
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            if (m(i, j) < -tol)
                throw NotStochasticError("negative entry in row " + std::to_string(i));
            s += m(i, j);
        }
        if (std::abs(s - 1.0) > tol)
            throw NotStochasticError("row " + std::to_string(i) + " sums to " + std::to_string(s));
    }
}

// Strong connectivity of the positive-entry digraph: state 0 must reach every
// state and every state must reach 0.
inline bool strongly_connected(const DenseMatrix& m) {
    const int n = m.n();
    auto reach = [&](bool forward) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                const double w = forward ? m(u, v) : m(v, u);
                if (w > 0.0 && !seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
            }
        }
        for (char c : seen)
            if (!c) return false;
        return true;
    };
    return reach(true) && reach(false);
}

// Solve pi^T (P - I) = 0, sum(pi) = 1 by Gaussian elimination with partial
// pivoting; the normalization replaces the last equation.
inline std::vector<double> stationary_by_elimination(const DenseMatrix& m) {
    const int n = m.n();
    std::vector<std::vector<double>> aug(n, std::vector<double>(n + 1, 0.0));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) aug[j][i] = m(i, j) - (i == j ? 1.0 : 0.0);
        aug[j][n] = 0.0;
    }
    for (int i = 0; i < n; ++i) aug[n - 1][i] = 1.0;
    aug[n - 1][n] = 1.0;

    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
        if (std::abs(aug[pivot][col]) < 1e-13)
            throw ReducibleError("stationary system is singular; fixed point is not unique");
        std::swap(aug[col], aug[pivot]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = aug[r][col] / aug[col][col];
            if (f == 0.0) continue;
            for (int c = col; c <= n; ++c) aug[r][c] -= f * aug[col][c];
        }
    }
    std::vector<double> pi(n);
    for (int i = 0; i < n; ++i) pi[i] = aug[i][n] / aug[i][i];
    return pi;
}

inline double stationary_residual(const DenseMatrix& m, const std::vector<double>& pi) {
    const int n = m.n();
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += pi[i] * m(i, j);
        worst = std::max(worst, std::abs(s - pi[j]));
    }
    return worst;
}

} // namespace detail

// Stationary distribution of a row-stochastic irreducible matrix. Power
// iteration on the transpose first, elimination fallback for slowly mixing
// or near-reducible inputs.
inline std::vector<double> stationary_distribution(const DenseMatrix& m, double tol = 1e-10) {
    if (tol <= 0.0) throw InvalidParameterError("tolerance must be positive");
    const int n = m.n();
    detail::check_row_stochastic(m, tol);
    if (!detail::strongly_connected(m))
        throw ReducibleError("transition matrix is not irreducible");

    std::vector<double> pi(n, 1.0 / n);
    std::vector<double> next(n, 0.0);
    const int max_iters = 200000;
    for (int iter = 0; iter < max_iters; ++iter) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += pi[i] * m(i, j);
            next[j] = s;
        }
        double norm = 0.0;
        for (double v : next) norm += v;
        double diff = 0.0;
        for (int j = 0; j < n; ++j) {
            next[j] /= norm;
            diff += std::abs(next[j] - pi[j]);
        }
        pi.swap(next);
        if (diff <= 1e-12) break;
    }

    if (detail::stationary_residual(m, pi) > 0.5 * tol) pi = detail::stationary_by_elimination(m);

    double sum = 0.0;
    for (double& v : pi) {
        if (v < 0.0 && v > -1e-12) v = 0.0;
        sum += v;
    }
    for (double& v : pi) v /= sum;
    for (double v : pi)
        if (v <= 0.0) throw ReducibleError("stationary distribution has a zero-mass state");
    if (detail::stationary_residual(m, pi) > tol)
        throw NoConvergenceError("stationary solve failed to reach tolerance");
    return pi;
}

} // namespace gapestim
