#pragma once

// Internal engine surface shared between the estimator and the pricer;
// not part of the installed API.

#include "quopt/mc_engine.hpp"

namespace quopt::detail {

struct EstimateStats {
    PricingResult result;
    double cheap_std_error = 0.0;  // standard error of the f_w_estimate leg
};

EstimateStats estimate_stats(const MarketState& state, const VolCorr& vc, const Basket& basket,
                             const SimConfig& cfg, bool parallel);

}  // namespace quopt::detail
