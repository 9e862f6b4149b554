#pragma once

#include <span>
#include <string>
#include <vector>

#include "quopt/linalg.hpp"
#include "quopt/market_data.hpp"

namespace quopt {

// Annualized volatilities (per sqrt-year) and log-return correlation matrix
// for a set of assets.
struct VolCorr {
    std::vector<std::string> asset_ids;
    std::vector<double> vols;
    Matrix corr;

    std::size_t size() const { return vols.size(); }
};

// (m-1) x n matrix of log returns: entry (k, i) = ln(P[k+1][i] / P[k][i]).
Matrix log_returns(const AlignedWindow& window);

// Sample standard deviation (k-1 divisor, mean estimated) scaled by
// sqrt(periods_per_year). Throws InsufficientDataError for fewer than 2
// returns.
double annualized_vol(std::span<const double> returns, double periods_per_year);

// Pearson correlation of the columns of a returns matrix. A zero-variance
// column raises DegenerateInputError naming the asset (names optional).
Matrix correlation_matrix(const Matrix& returns,
                          const std::vector<std::string>* asset_ids = nullptr);

// Volatility/correlation estimation from an aligned price window.
VolCorr calibrate(const AlignedWindow& window, double periods_per_year = 252.0);

}  // namespace quopt
