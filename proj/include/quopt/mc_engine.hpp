#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "quopt/calibration.hpp"
#include "quopt/linalg.hpp"

namespace quopt {

// Spot prices and flat risk-free curve at the valuation date.
struct MarketState {
    std::vector<double> spot;  // one positive price per asset
    double tau = 0.0;          // time to expiry in years, > 0
    double rate = 0.0;         // continuously compounded annual risk-free rate

    void validate() const;
};

// Delivery choice: one par asset plus alternatives, each alternative with a
// delivery discount subtracted from the settlement proceeds.
struct Basket {
    std::size_t par_index = 0;
    std::vector<double> discounts;  // aligned with assets; par entry must be 0
    std::vector<std::string> asset_ids;

    void validate(std::size_t n_assets) const;
};

struct SimConfig {
    std::uint64_t n_pairs = 50'000;  // antithetic pairs; total paths = 2 * n_pairs
    std::uint64_t seed = 271'828;
    std::size_t chunk_size = 4'096;  // pairs per deterministic substream
    int threads = 0;                 // worker cap; 0 = runtime default. Never affects results.
};

struct PricingResult {
    double value = 0.0;          // quality option estimate (terminal expectation)
    double std_error = 0.0;      // over antithetic pair averages
    double f_wo = 0.0;           // par terminal price averaged over the same paths
    double f_w_estimate = 0.0;   // cheapest-deliverable terminal price over the same paths
    std::uint64_t n_paths = 0;   // 2 * n_pairs
    std::uint64_t seed = 0;
    double elapsed_seconds = 0.0;
};

// Exact lognormal terminal sampling, no time stepping:
//   S_i(T) = spot_i * exp((rate - vol_i^2/2) tau + vol_i sqrt(tau) (L z)_i)
std::vector<double> terminal_prices(const MarketState& state, const VolCorr& vc,
                                    const LowerTriangular& chol,
                                    std::span<const double> z);

// Short's delivery payoff: max(S_par - min over alternatives of (S_i + d_i), 0).
double payoff(std::span<const double> terminal, const Basket& basket);

// Antithetic Monte Carlo estimate of the quality option value. Paths are
// generated in fixed-size chunks of the counter-based stream and chunk
// results are combined in chunk order, so the result is bit-identical for
// any worker count. No discounting is applied: the option rides inside a
// margined futures price, so its value is the terminal expectation itself.
PricingResult estimate(const MarketState& state, const VolCorr& vc, const Basket& basket,
                       const SimConfig& cfg);

// Single-threaded reference estimator. Produces bit-identical results to
// estimate(); kept for tests and benchmarks.
PricingResult estimate_serial(const MarketState& state, const VolCorr& vc,
                              const Basket& basket, const SimConfig& cfg);

}  // namespace quopt
