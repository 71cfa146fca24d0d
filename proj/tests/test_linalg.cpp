#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gapestim/chain.hpp"
#include "gapestim/linalg.hpp"

using namespace gapestim;

namespace {

DenseMatrix lazy_cycle_kernel(int n) {
    DenseMatrix P(n);
    for (int i = 0; i < n; ++i) {
        P(i, i) = 0.5;
        P(i, (i + 1) % n) += 0.25;
        P(i, (i + n - 1) % n) += 0.25;
    }
    return P;
}

// Closed-form spectrum of the lazy cycle: (1 + cos(2 pi j / n)) / 2, j = 0..n-1.
std::vector<double> lazy_cycle_spectrum(int n) {
    std::vector<double> eig(n);
    for (int j = 0; j < n; ++j) eig[j] = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * j / n));
    std::sort(eig.begin(), eig.end(), std::greater<double>());
    return eig;
}

} // namespace

TEST_CASE("symmetric_eigenvalues: identity") {
    const auto eig = symmetric_eigenvalues(DenseMatrix::identity(3));
    REQUIRE(eig.size() == 3);
    for (double v : eig) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("symmetric_eigenvalues: 2x2 closed form a +- b") {
    const auto m = DenseMatrix::from_rows({{0.75, 0.25}, {0.25, 0.75}});
    const auto eig = symmetric_eigenvalues(m);
    CHECK(eig[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eig[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("symmetric_eigenvalues: lazy cycle matches circulant closed form") {
    for (int n : {4, 8, 16, 30}) {
        const auto eig = symmetric_eigenvalues(lazy_cycle_kernel(n), 1e-12);
        const auto expected = lazy_cycle_spectrum(n);
        for (int j = 0; j < n; ++j) CHECK(std::abs(eig[j] - expected[j]) < 1e-10);
    }
}

TEST_CASE("symmetric_eigenvalues: n = 1") {
    const auto eig = symmetric_eigenvalues(DenseMatrix::from_rows({{3.5}}));
    REQUIRE(eig.size() == 1);
    CHECK(eig[0] == doctest::Approx(3.5));
}

TEST_CASE("symmetric_eigenvalues: rejects asymmetric input") {
    const auto m = DenseMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
    CHECK_THROWS_AS((void)symmetric_eigenvalues(m, 1e-10), NotSymmetricError);
}

TEST_CASE("symmetric_eigenvalues: eigenvalue sum equals trace") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        Xoshiro256PlusPlus rng(seed);
        const int n = 12;
        DenseMatrix m(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double v = 2.0 * rng.next_double() - 1.0;
                m(i, j) = v;
                m(j, i) = v;
            }
        const auto eig = symmetric_eigenvalues(m, 1e-12);
        double sum = 0.0;
        for (double v : eig) sum += v;
        CHECK(std::abs(sum - m.trace()) < 1e-8 * n);
    }
}

TEST_CASE("matrix_power: a = 1 returns the input") {
    const auto m = DenseMatrix::from_rows({{0.75, 0.25}, {0.25, 0.75}});
    const auto p = matrix_power(m, 1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(p(i, j) == m(i, j));
}

TEST_CASE("matrix_power: 2x2 square by hand") {
    const auto m = DenseMatrix::from_rows({{0.75, 0.25}, {0.25, 0.75}});
    const auto p = matrix_power(m, 2);
    CHECK(p(0, 0) == doctest::Approx(0.625).epsilon(1e-14));
    CHECK(p(0, 1) == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(p(1, 0) == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(p(1, 1) == doctest::Approx(0.625).epsilon(1e-14));
}

TEST_CASE("matrix_power: rejects a = 0") {
    CHECK_THROWS_AS((void)matrix_power(DenseMatrix::identity(2), 0), InvalidParameterError);
}

TEST_CASE("matrix_power: lazy-cycle second eigenvalue follows the power rule") {
    const int n = 8;
    const auto p4 = matrix_power(lazy_cycle_kernel(n), 4);
    const auto eig = symmetric_eigenvalues(p4, 1e-12);
    const double gamma = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi / n));
    CHECK(std::abs((1.0 - eig[1]) - (1.0 - std::pow(1.0 - gamma, 4))) < 1e-10);
}

TEST_CASE("matrix_power: stochastic rows stay stochastic") {
    const auto chain = make_random_reversible(9, 123);
    const auto p = matrix_power(chain.kernel(), 16);
    for (double s : p.row_sums()) CHECK(std::abs(s - 1.0) < 1e-12);
}

TEST_CASE("matrix_power: exponent additivity") {
    const auto chain = make_random_reversible(6, 77);
    const auto& m = chain.kernel();
    const auto lhs = matrix_power(m, 5);
    const auto rhs = multiply(matrix_power(m, 2), matrix_power(m, 3));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) CHECK(std::abs(lhs(i, j) - rhs(i, j)) < 1e-10);
}

TEST_CASE("stationary_distribution: symmetric chain is uniform") {
    const auto m = DenseMatrix::from_rows({{0.75, 0.25}, {0.25, 0.75}});
    const auto pi = stationary_distribution(m);
    CHECK(pi[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pi[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("stationary_distribution: two-state closed form (q, p)/(p+q)") {
    const auto m = DenseMatrix::from_rows({{0.8, 0.2}, {0.1, 0.9}});
    const auto pi = stationary_distribution(m);
    CHECK(pi[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(pi[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("stationary_distribution: reversible chain recovers weight row sums") {
    // Independent oracle: for P = row-normalized symmetric W (plus laziness),
    // pi is proportional to the row sums of W.
    DenseMatrix w(4);
    const double weights[4][4] = {{1.0, 2.0, 0.5, 1.5},
                                  {2.0, 3.0, 1.0, 0.5},
                                  {0.5, 1.0, 2.0, 2.5},
                                  {1.5, 0.5, 2.5, 1.0}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) w(i, j) = weights[i][j];
    const auto chain = make_reversible_from_weights(w, 0.6, "weights-test");

    const auto pi = stationary_distribution(chain.kernel(), 1e-12);
    double total = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) total += weights[i][j];
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += weights[i][j];
        CHECK(pi[i] == doctest::Approx(row / total).epsilon(1e-10));
    }
}

TEST_CASE("stationary_distribution: detailed balance for reversible chains") {
    const auto chain = make_random_reversible(10, 7);
    const auto pi = stationary_distribution(chain.kernel(), 1e-12);
    const auto& p = chain.kernel();
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            CHECK(std::abs(pi[i] * p(i, j) - pi[j] * p(j, i)) < 1e-10);
}

TEST_CASE("stationary_distribution: slow chain still meets the residual target") {
    const auto chain = make_lazy_cycle(64); // gap ~ 2.4e-3
    const auto pi = stationary_distribution(chain.kernel(), 1e-10);
    for (double v : pi) CHECK(v == doctest::Approx(1.0 / 64).epsilon(1e-9));
}

TEST_CASE("stationary_distribution: elimination fallback for a nearly reducible chain") {
    // gap 3e-6: power iteration cannot converge within its cap, the solve
    // must come from the linear system.
    const auto m = DenseMatrix::from_rows({{1.0 - 1e-6, 1e-6}, {2e-6, 1.0 - 2e-6}});
    const auto pi = stationary_distribution(m, 1e-10);
    CHECK(pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(pi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("stationary_distribution: rejects non-stochastic rows") {
    const auto m = DenseMatrix::from_rows({{0.9, 0.2}, {0.1, 0.9}});
    CHECK_THROWS_AS((void)stationary_distribution(m), NotStochasticError);
}

TEST_CASE("stationary_distribution: rejects reducible chains") {
    const auto disconnected = DenseMatrix::from_rows({{1.0, 0.0}, {0.0, 1.0}});
    CHECK_THROWS_AS((void)stationary_distribution(disconnected), ReducibleError);

    const auto block = DenseMatrix::from_rows({{0.5, 0.5, 0.0, 0.0},
                                               {0.5, 0.5, 0.0, 0.0},
                                               {0.0, 0.0, 0.5, 0.5},
                                               {0.0, 0.0, 0.5, 0.5}});
    CHECK_THROWS_AS((void)stationary_distribution(block), ReducibleError);
}

TEST_CASE("DenseMatrix: rejects non-finite entries and bad dimensions") {
    CHECK_THROWS_AS(DenseMatrix(0), InvalidParameterError);
    CHECK_THROWS_AS(DenseMatrix(2, {1.0, 0.0, std::nan(""), 1.0}), InvalidParameterError);
    CHECK_THROWS_AS(DenseMatrix(2, {1.0, 0.0}), InvalidParameterError);
}
