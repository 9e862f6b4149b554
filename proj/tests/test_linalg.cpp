#include <doctest.h>

#include <cmath>
#include <random>

#include "quopt/errors.hpp"
#include "quopt/linalg.hpp"

using namespace quopt;

namespace {

double reconstruction_error(const LowerTriangular& L, const Matrix& corr) {
    const std::size_t n = corr.rows();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k <= std::min(i, j); ++k) acc += L(i, k) * L(j, k);
            worst = std::max(worst, std::abs(acc - corr(i, j)));
        }
    }
    return worst;
}

// Random unit-diagonal PSD matrix: normalized Gram matrix of a random
// tall factor.
Matrix random_correlation(std::size_t n, std::mt19937_64& gen) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t factors = n + 4;
    Matrix b(n, factors);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < factors; ++k) b(i, k) = normal(gen);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < factors; ++k) acc += b(i, k) * b(j, k);
            a(i, j) = acc;
            a(j, i) = acc;
        }
    }
    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i) scale[i] = 1.0 / std::sqrt(a(i, i));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= scale[i] * scale[j];
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) a(j, i) = a(i, j);
    return a;
}

Matrix equicorrelation(std::size_t n, double rho) {
    Matrix m(n, n, rho);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

}  // namespace

TEST_CASE("cholesky of the identity is the identity, exactly") {
    for (std::size_t n : {1u, 3u, 7u}) {
        const auto L = cholesky(Matrix::identity(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) CHECK(L(i, j) == (i == j ? 1.0 : 0.0));
    }
}

TEST_CASE("cholesky of a 2x2 correlation") {
    Matrix m = equicorrelation(2, 0.95);
    const auto L = cholesky(m);
    CHECK(L(0, 0) == 1.0);
    CHECK(L(0, 1) == 0.0);
    CHECK(L(1, 0) == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(L(1, 1) == doctest::Approx(std::sqrt(1.0 - 0.95 * 0.95)).epsilon(1e-15));
    CHECK(L(1, 1) == doctest::Approx(0.312250).epsilon(1e-6));
    CHECK(reconstruction_error(L, m) <= 1e-15);
}

TEST_CASE("cholesky rejects indefinite and malformed input") {
    Matrix bad = equicorrelation(2, 1.5);
    try {
        cholesky(bad);
        FAIL("expected NotPsdError");
    } catch (const NotPsdError& e) {
        CHECK(e.leading_minor == 2);
    }

    Matrix asym = equicorrelation(2, 0.5);
    asym(0, 1) = 0.5 + 1e-6;
    CHECK_THROWS_AS(cholesky(asym), DomainError);

    Matrix diag = equicorrelation(2, 0.5);
    diag(0, 0) = 1.01;
    CHECK_THROWS_AS(cholesky(diag), DomainError);

    // Perfectly singular: pivot hits the tolerance
    CHECK_THROWS_AS(cholesky(equicorrelation(2, 1.0)), NotPsdError);
}

TEST_CASE("cholesky reconstruction stays under 1e-10 on random correlations") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + gen() % 49;  // up to 50
        const Matrix corr = random_correlation(n, gen);
        const auto L = cholesky(corr);
        CHECK(reconstruction_error(L, corr) <= 1e-10);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(L(i, i) > 0.0);
            for (std::size_t j = i + 1; j < n; ++j) CHECK(L(i, j) == 0.0);
        }
    }
}

TEST_CASE("LowerTriangular::apply computes L z") {
    Matrix m = equicorrelation(3, 0.5);
    const auto L = cholesky(m);
    const std::vector<double> z{1.0, -2.0, 0.5};
    std::vector<double> y(3);
    L.apply(z, y);
    for (std::size_t i = 0; i < 3; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j) acc += L(i, j) * z[j];
        CHECK(y[i] == acc);
    }
}

TEST_CASE("jacobi_eigenvalues matches the trace and factorable spectra") {
    std::mt19937_64 gen(5);
    const Matrix corr = random_correlation(6, gen);
    Matrix vectors;
    const auto values = jacobi_eigenvalues(corr, &vectors);
    double trace = 0.0;
    for (double v : values) trace += v;
    CHECK(trace == doctest::Approx(6.0).epsilon(1e-10));
    // V diag(values) V^T reproduces the input
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < 6; ++k) acc += vectors(i, k) * values[k] * vectors(j, k);
            CHECK(acc == doctest::Approx(corr(i, j)).epsilon(1e-9));
        }
    }
}

TEST_CASE("nearest_psd_clip: fixed points and repairs") {
    SUBCASE("identity is untouched") {
        const Matrix out = nearest_psd_clip(Matrix::identity(4));
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                CHECK(out(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
    SUBCASE("already-PSD input returns itself within 1e-10") {
        std::mt19937_64 gen(77);
        const Matrix corr = random_correlation(5, gen);
        const Matrix out = nearest_psd_clip(corr);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j)
                CHECK(std::abs(out(i, j) - corr(i, j)) <= 1e-10);
    }
    SUBCASE("equicorrelated -0.9 has a negative eigenvalue and gets repaired") {
        const Matrix broken = equicorrelation(3, -0.9);  // eigenvalue 1 + 2 rho = -0.8
        CHECK_THROWS_AS(cholesky(broken), NotPsdError);
        const Matrix fixed = nearest_psd_clip(broken);
        for (std::size_t i = 0; i < 3; ++i) CHECK(fixed(i, i) == 1.0);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK(fixed(i, j) == fixed(j, i));
        const auto values = jacobi_eigenvalues(fixed);
        for (double v : values) CHECK(v > 0.0);
        CHECK_NOTHROW(cholesky(fixed));
        // The repair moves off-diagonals as little as the clip allows;
        // they stay negative and above -1.
        CHECK(fixed(0, 1) > -1.0);
        CHECK(fixed(0, 1) < 0.0);
    }
    SUBCASE("output always satisfies the cholesky precondition") {
        std::mt19937_64 gen(123);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 2 + gen() % 7;
            Matrix m(n, n);
            for (std::size_t i = 0; i < n; ++i) {
                m(i, i) = 1.0;
                for (std::size_t j = 0; j < i; ++j) {
                    m(i, j) = uni(gen);
                    m(j, i) = m(i, j);
                }
            }
            CHECK_NOTHROW(cholesky(nearest_psd_clip(m)));
        }
    }
}
