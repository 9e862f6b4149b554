#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quopt/mc_engine.hpp"

namespace quopt {

// Full valuation: the direct estimate plus the two-step difference computed
// on the same path set, and optionally the option value as a percentage of
// an observed market futures price.
struct ValuationReport {
    PricingResult direct;
    double two_step_value = 0.0;  // f_wo - f_w_estimate from the shared path set
    std::optional<double> ratio_pct;
};

// Cost-of-carry futures price with no embedded option: S_par * exp(rate * tau).
double futures_without_option(const MarketState& state, std::size_t par_index = 0);

// Futures price with the embedded option: terminal expectation of the
// cheapest delivery-adjusted asset over the antithetic path set. value and
// std_error describe that expectation; the remaining fields are shared with
// estimate() run on the same paths.
PricingResult futures_with_option_mc(const MarketState& state, const VolCorr& vc,
                                     const Basket& basket, const SimConfig& cfg);

// Runs the Monte Carlo once and reports both valuation routes.
ValuationReport value_quality_option(const MarketState& state, const VolCorr& vc,
                                     const Basket& basket, const SimConfig& cfg,
                                     std::optional<double> market_futures_price = std::nullopt);

// Deterministic two-asset oracle: E[max(S1(T) - S2(T) - d2, 0)] by tensor
// Gauss-Legendre quadrature against the normal density, nodes_per_axis
// nodes per axis on [-8, 8] with each axis restricted to the payoff
// support (the integrand has a kink at the exercise boundary; integrating
// only where it is smooth restores spectral convergence).
double quadrature_oracle_2asset(const MarketState& state, const VolCorr& vc, double d2,
                                std::size_t nodes_per_axis = 200);

struct BoyleCell {
    int n_assets = 0;
    double rho = 0.0;
    double mc_value = 0.0;
    double reference_value = 0.0;
    double relative_error_pct = 0.0;
};

// Reruns the Boyle (1989) equicorrelated benchmark: spots 40, vols 25%,
// rate 10%, tau backed out of the published no-option futures price 43.11,
// zero discounts, n in {2,..,50}, rho in {0.95, 0.995}.
std::vector<BoyleCell> boyle_table(const SimConfig& cfg);

// CSV with header n,rho,mc_value,reference_value,relative_error_pct.
std::string boyle_table_csv(const std::vector<BoyleCell>& cells);

// Tenor implied by Boyle's stated futures price: ln(43.11/40)/0.10.
double boyle_tau();

}  // namespace quopt
