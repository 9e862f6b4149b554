#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace quopt {

// Dense row-major matrix. Everything in this project is small (n <= ~50),
// so no effort is spent on blocking or expression templates.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    std::span<const double> data() const { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Lower-triangular Cholesky factor with strictly positive diagonal.
class LowerTriangular {
  public:
    explicit LowerTriangular(Matrix m) : m_(std::move(m)) {}

    std::size_t dim() const { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const Matrix& matrix() const { return m_; }

    // y = L * z, writing into `out` (out may not alias z).
    void apply(std::span<const double> z, std::span<double> out) const;

  private:
    Matrix m_;
};

// Cholesky factorization of a symmetric unit-diagonal matrix.
// Preconditions checked: square, symmetric within 1e-12, unit diagonal
// within 1e-12. Throws NotPsdError naming the failing leading minor when a
// pivot falls at or below 1e-12.
LowerTriangular cholesky(const Matrix& corr);

// Repairs an indefinite symmetric matrix by clipping eigenvalues to >= 1e-8
// and rescaling back to unit diagonal. The result always factors.
Matrix nearest_psd_clip(const Matrix& corr);

// Symmetric eigendecomposition by cyclic Jacobi rotations. Returns
// eigenvalues (unsorted); eigenvectors_out, if non-null, receives the
// orthogonal matrix with eigenvectors in columns. Adequate for the small
// dense matrices used here.
std::vector<double> jacobi_eigenvalues(const Matrix& sym, Matrix* eigenvectors_out = nullptr);

}  // namespace quopt
