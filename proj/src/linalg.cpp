#include "quopt/linalg.hpp"

#include <cmath>
#include <string>

#include "quopt/errors.hpp"

namespace quopt {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPivotTol = 1e-12;
constexpr double kEigenFloor = 1e-8;

void require_symmetric_unit_diagonal(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw DomainError("matrix is not square");
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (std::abs(m(i, i) - 1.0) > kSymmetryTol) {
            throw DomainError("correlation matrix diagonal entry " + std::to_string(i) +
                              " is not 1");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(m(i, j) - m(j, i)) > kSymmetryTol) {
                throw DomainError("correlation matrix is not symmetric at (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void LowerTriangular::apply(std::span<const double> z, std::span<double> out) const {
    const std::size_t n = dim();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j) acc += m_(i, j) * z[j];
        out[i] = acc;
    }
}

LowerTriangular cholesky(const Matrix& corr) {
    require_symmetric_unit_diagonal(corr);
    const std::size_t n = corr.rows();
    Matrix L(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = corr(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= L(j, k) * L(j, k);
        if (pivot <= kPivotTol) {
            throw NotPsdError("matrix is not positive definite: leading minor of order " +
                                  std::to_string(j + 1) + " has pivot " +
                                  std::to_string(pivot),
                              j + 1);
        }
        const double diag = std::sqrt(pivot);
        L(j, j) = diag;
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = corr(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= L(i, k) * L(j, k);
            L(i, j) = acc / diag;
        }
    }
    return LowerTriangular{std::move(L)};
}

std::vector<double> jacobi_eigenvalues(const Matrix& sym, Matrix* eigenvectors_out) {
    if (sym.rows() != sym.cols()) {
        throw DomainError("matrix is not square");
    }
    const std::size_t n = sym.rows();
    Matrix a = sym;
    Matrix v = Matrix::identity(n);

    // Cyclic sweeps over the strict upper triangle until off-diagonal mass
    // is negligible relative to the diagonal.
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30 * static_cast<double>(n * n)) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<double> eigenvalues(n);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a(i, i);
    if (eigenvectors_out) *eigenvectors_out = std::move(v);
    return eigenvalues;
}

Matrix nearest_psd_clip(const Matrix& corr) {
    if (corr.rows() != corr.cols()) {
        throw DomainError("matrix is not square");
    }
    const std::size_t n = corr.rows();

    Matrix vectors;
    std::vector<double> values = jacobi_eigenvalues(corr, &vectors);
    for (double& lambda : values) lambda = std::max(lambda, kEigenFloor);

    // Reconstruct V diag(lambda) V^T, then rescale to unit diagonal.
    Matrix repaired(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += vectors(i, k) * values[k] * vectors(j, k);
            repaired(i, j) = acc;
            repaired(j, i) = acc;
        }
    }
    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i) scale[i] = 1.0 / std::sqrt(repaired(i, i));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) repaired(i, j) *= scale[i] * scale[j];
        repaired(i, i) = 1.0;
    }
    return repaired;
}

}  // namespace quopt
