#include "quopt/calibration.hpp"

#include <cmath>
#include <string>

#include "quopt/errors.hpp"

namespace quopt {

namespace {

double column_mean(const Matrix& m, std::size_t col) {
    double sum = 0.0;
    for (std::size_t k = 0; k < m.rows(); ++k) sum += m(k, col);
    return sum / static_cast<double>(m.rows());
}

}  // namespace

Matrix log_returns(const AlignedWindow& window) {
    const std::size_t m = window.prices.rows();
    const std::size_t n = window.prices.cols();
    if (m < 2) {
        throw InsufficientDataError("need at least 2 price rows to form returns, got " +
                                    std::to_string(m));
    }
    Matrix returns(m - 1, n);
    for (std::size_t k = 0; k + 1 < m; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            returns(k, i) = std::log(window.prices(k + 1, i) / window.prices(k, i));
        }
    }
    return returns;
}

double annualized_vol(std::span<const double> returns, double periods_per_year) {
    const std::size_t k = returns.size();
    if (k < 2) {
        throw InsufficientDataError("need at least 2 returns for a volatility, got " +
                                    std::to_string(k));
    }
    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(k);
    double ss = 0.0;
    for (double r : returns) ss += (r - mean) * (r - mean);
    const double variance = ss / static_cast<double>(k - 1);
    return std::sqrt(variance * periods_per_year);
}

Matrix correlation_matrix(const Matrix& returns, const std::vector<std::string>* asset_ids) {
    const std::size_t rows = returns.rows();
    const std::size_t n = returns.cols();
    if (rows < 2) {
        throw InsufficientDataError("need at least 2 return rows for correlations, got " +
                                    std::to_string(rows));
    }

    std::vector<double> mean(n), sd(n);
    for (std::size_t i = 0; i < n; ++i) {
        mean[i] = column_mean(returns, i);
        double ss = 0.0;
        for (std::size_t k = 0; k < rows; ++k) {
            const double d = returns(k, i) - mean[i];
            ss += d * d;
        }
        sd[i] = std::sqrt(ss);
        if (sd[i] == 0.0) {
            const std::string name =
                asset_ids && i < asset_ids->size() ? (*asset_ids)[i] : "column " + std::to_string(i);
            throw DegenerateInputError("asset " + name +
                                       " has zero return variance; correlation is undefined");
        }
    }

    Matrix corr(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        corr(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) {
            double cross = 0.0;
            for (std::size_t k = 0; k < rows; ++k) {
                cross += (returns(k, i) - mean[i]) * (returns(k, j) - mean[j]);
            }
            double rho = cross / (sd[i] * sd[j]);
            rho = std::min(1.0, std::max(-1.0, rho));
            corr(i, j) = rho;
            corr(j, i) = rho;
        }
    }
    return corr;
}

VolCorr calibrate(const AlignedWindow& window, double periods_per_year) {
    const Matrix returns = log_returns(window);
    const std::size_t n = returns.cols();

    VolCorr out;
    out.asset_ids = window.asset_ids;
    out.vols.resize(n);
    std::vector<double> column(returns.rows());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < returns.rows(); ++k) column[k] = returns(k, i);
        out.vols[i] = annualized_vol(column, periods_per_year);
    }
    if (n == 1) {
        // Correlation of a single asset with itself; skips the degeneracy
        // check so a constant single series still reports vol 0.
        out.corr = Matrix::identity(1);
    } else {
        out.corr = correlation_matrix(returns, &window.asset_ids);
    }
    return out;
}

}  // namespace quopt
