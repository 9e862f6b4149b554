#include "quopt/mc_engine.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "engine_detail.hpp"
#include "quopt/errors.hpp"
#include "quopt/rng.hpp"

namespace quopt {

namespace {

struct ChunkSums {
    double pay = 0.0;      // pair-averaged payoffs
    double pay_sq = 0.0;   // their squares
    double par = 0.0;      // pair-averaged par terminal prices
    double cheap = 0.0;    // pair-averaged min delivery-adjusted terminal prices
    double cheap_sq = 0.0;
};

struct PathParams {
    std::vector<double> drift;  // (rate - vol^2/2) * tau
    std::vector<double> scale;  // vol * sqrt(tau)
    std::vector<double> discount;
    std::size_t par = 0;
};

PathParams make_params(const MarketState& state, const VolCorr& vc, const Basket& basket) {
    const std::size_t n = state.spot.size();
    PathParams p;
    p.drift.resize(n);
    p.scale.resize(n);
    p.discount = basket.discounts;
    p.par = basket.par_index;
    const double sqrt_tau = std::sqrt(state.tau);
    for (std::size_t i = 0; i < n; ++i) {
        p.drift[i] = (state.rate - 0.5 * vc.vols[i] * vc.vols[i]) * state.tau;
        p.scale[i] = vc.vols[i] * sqrt_tau;
    }
    return p;
}

// One antithetic pair: the same correlated draw y with both signs.
inline void accumulate_pair(const MarketState& state, const PathParams& p,
                            std::span<const double> y, ChunkSums& sums) {
    const std::size_t n = state.spot.size();
    double pay[2], par[2], cheap[2];
    for (int sign = 0; sign < 2; ++sign) {
        const double flip = sign == 0 ? 1.0 : -1.0;
        double min_adj = std::numeric_limits<double>::infinity();
        double par_price = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = state.spot[i] * std::exp(p.drift[i] + flip * p.scale[i] * y[i]);
            const double adj = s + p.discount[i];
            if (adj < min_adj) min_adj = adj;
            if (i == p.par) par_price = s;
        }
        par[sign] = par_price;
        cheap[sign] = min_adj;
        // Identical to max(par - min over alternatives, 0): when every
        // alternative is dearer than par, the min is par itself.
        pay[sign] = par_price - min_adj;
    }
    const double pay_avg = 0.5 * (pay[0] + pay[1]);
    sums.pay += pay_avg;
    sums.pay_sq += pay_avg * pay_avg;
    sums.par += 0.5 * (par[0] + par[1]);
    const double cheap_avg = 0.5 * (cheap[0] + cheap[1]);
    sums.cheap += cheap_avg;
    sums.cheap_sq += cheap_avg * cheap_avg;
}

ChunkSums run_chunk(const MarketState& state, const LowerTriangular& chol,
                    const PathParams& params, std::uint64_t seed, std::uint64_t pair_begin,
                    std::uint64_t pair_end) {
    const std::size_t n = state.spot.size();
    std::vector<double> z(n), y(n);
    ChunkSums sums;
    for (std::uint64_t pair = pair_begin; pair < pair_end; ++pair) {
        for (std::size_t j = 0; j < n; ++j) {
            z[j] = rng::normal_draw(seed, pair * n + j);
        }
        chol.apply(z, y);
        accumulate_pair(state, params, y, sums);
    }
    return sums;
}

double sample_std_error(double sum, double sum_sq, double n) {
    if (n < 2.0) return 0.0;
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return std::sqrt(var / n);
}

void validate_inputs(const MarketState& state, const VolCorr& vc, const Basket& basket,
                     const SimConfig& cfg) {
    state.validate();
    basket.validate(state.spot.size());
    if (vc.size() != state.spot.size()) {
        throw DomainError("volatility count " + std::to_string(vc.size()) +
                          " does not match asset count " + std::to_string(state.spot.size()));
    }
    if (vc.corr.rows() != vc.size() || vc.corr.cols() != vc.size()) {
        throw DomainError("correlation matrix is " + std::to_string(vc.corr.rows()) + "x" +
                          std::to_string(vc.corr.cols()) + " for " + std::to_string(vc.size()) +
                          " assets");
    }
    for (double v : vc.vols) {
        if (v < 0.0 || !std::isfinite(v)) throw DomainError("volatilities must be >= 0");
    }
    if (cfg.n_pairs < 1) throw DomainError("n_pairs must be >= 1");
    if (cfg.chunk_size < 1) throw DomainError("chunk_size must be >= 1");
}

}  // namespace

void MarketState::validate() const {
    if (spot.empty()) throw DomainError("no spot prices");
    for (double s : spot) {
        if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("spot prices must be positive");
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau must be positive");
    if (!std::isfinite(rate)) throw DomainError("rate must be finite");
}

void Basket::validate(std::size_t n_assets) const {
    if (n_assets < 2) {
        throw InvalidBasketError("need at least 2 deliverable assets, got " +
                                 std::to_string(n_assets));
    }
    if (discounts.size() != n_assets) {
        throw InvalidBasketError("discount count " + std::to_string(discounts.size()) +
                                 " does not match asset count " + std::to_string(n_assets));
    }
    if (par_index >= n_assets) {
        throw InvalidBasketError("par index " + std::to_string(par_index) + " out of range");
    }
    if (discounts[par_index] != 0.0) {
        throw InvalidBasketError("par asset must have zero discount");
    }
    for (double d : discounts) {
        if (!std::isfinite(d)) throw InvalidBasketError("discounts must be finite");
    }
}

std::vector<double> terminal_prices(const MarketState& state, const VolCorr& vc,
                                    const LowerTriangular& chol, std::span<const double> z) {
    const std::size_t n = state.spot.size();
    if (vc.size() != n || chol.dim() != n || z.size() != n) {
        throw DomainError("terminal_prices: dimension mismatch");
    }
    const double sqrt_tau = std::sqrt(state.tau);
    std::vector<double> y(n), out(n);
    chol.apply(z, y);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = state.spot[i] *
                 std::exp((state.rate - 0.5 * vc.vols[i] * vc.vols[i]) * state.tau +
                          vc.vols[i] * sqrt_tau * y[i]);
    }
    return out;
}

double payoff(std::span<const double> terminal, const Basket& basket) {
    basket.validate(terminal.size());
    double min_alt = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < terminal.size(); ++i) {
        if (i == basket.par_index) continue;
        const double adj = terminal[i] + basket.discounts[i];
        if (adj < min_alt) min_alt = adj;
    }
    return std::max(terminal[basket.par_index] - min_alt, 0.0);
}

namespace detail {

EstimateStats estimate_stats(const MarketState& state, const VolCorr& vc, const Basket& basket,
                             const SimConfig& cfg, bool parallel) {
    validate_inputs(state, vc, basket, cfg);
    const auto start = std::chrono::steady_clock::now();
    const LowerTriangular chol = cholesky(vc.corr);
    const PathParams params = make_params(state, vc, basket);

    // Chunks are self-contained jobs over disjoint pair ranges; the combine
    // below runs in chunk-index order, so the result does not depend on how
    // many workers processed them (or whether OpenMP is enabled at all).
    const std::uint64_t n_chunks = (cfg.n_pairs + cfg.chunk_size - 1) / cfg.chunk_size;
    std::vector<ChunkSums> sums(n_chunks);
    const long long chunk_count = static_cast<long long>(n_chunks);

#if defined(_OPENMP)
    const int max_threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(max_threads) \
    if (parallel && chunk_count > 1)
#endif
    for (long long c = 0; c < chunk_count; ++c) {
        const std::uint64_t begin = static_cast<std::uint64_t>(c) * cfg.chunk_size;
        const std::uint64_t end = std::min<std::uint64_t>(begin + cfg.chunk_size, cfg.n_pairs);
        sums[static_cast<std::size_t>(c)] =
            run_chunk(state, chol, params, cfg.seed, begin, end);
    }
#if !defined(_OPENMP)
    (void)parallel;
#endif

    ChunkSums total;
    for (const ChunkSums& c : sums) {
        total.pay += c.pay;
        total.pay_sq += c.pay_sq;
        total.par += c.par;
        total.cheap += c.cheap;
        total.cheap_sq += c.cheap_sq;
    }

    const double n = static_cast<double>(cfg.n_pairs);
    EstimateStats stats;
    PricingResult& r = stats.result;
    r.value = total.pay / n;
    r.f_wo = total.par / n;
    r.f_w_estimate = total.cheap / n;
    r.std_error = sample_std_error(total.pay, total.pay_sq, n);
    stats.cheap_std_error = sample_std_error(total.cheap, total.cheap_sq, n);
    r.n_paths = 2 * cfg.n_pairs;
    r.seed = cfg.seed;
    r.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return stats;
}

}  // namespace detail

PricingResult estimate(const MarketState& state, const VolCorr& vc, const Basket& basket,
                       const SimConfig& cfg) {
    return detail::estimate_stats(state, vc, basket, cfg, /*parallel=*/true).result;
}

PricingResult estimate_serial(const MarketState& state, const VolCorr& vc, const Basket& basket,
                              const SimConfig& cfg) {
    return detail::estimate_stats(state, vc, basket, cfg, /*parallel=*/false).result;
}

}  // namespace quopt
