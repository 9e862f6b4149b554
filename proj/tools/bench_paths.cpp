// Times the OpenMP estimator against the serial reference on a mid-size
// basket and verifies they produce bit-identical results.
//
//   quopt-bench [n_assets] [total_paths]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "quopt/mc_engine.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace {

double run_timed(const char* label, int threads, bool parallel, const quopt::MarketState& state,
                 const quopt::VolCorr& vc, const quopt::Basket& basket, quopt::SimConfig cfg,
                 const quopt::PricingResult* reference) {
    cfg.threads = threads;
    const auto start = std::chrono::steady_clock::now();
    const quopt::PricingResult r = parallel ? quopt::estimate(state, vc, basket, cfg)
                                            : quopt::estimate_serial(state, vc, basket, cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double mpaths = static_cast<double>(r.n_paths) / 1e6 / secs;
    const bool matches = !reference || (r.value == reference->value &&
                                        r.std_error == reference->std_error &&
                                        r.f_wo == reference->f_wo &&
                                        r.f_w_estimate == reference->f_w_estimate);
    std::printf("%-14s %8.3fs  %7.2f Mpaths/s  value=%.12f  %s\n", label, secs, mpaths, r.value,
                matches ? "bit-identical" : "MISMATCH");
    return secs;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 10;
    const std::uint64_t total_paths = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 2'000'000;

    quopt::MarketState state{std::vector<double>(n, 40.0), 0.75, 0.10};
    quopt::VolCorr vc;
    vc.vols.assign(n, 0.25);
    vc.corr = quopt::Matrix(n, n, 0.95);
    for (std::size_t i = 0; i < n; ++i) vc.corr(i, i) = 1.0;
    quopt::Basket basket{0, std::vector<double>(n, 0.0), {}};

    quopt::SimConfig cfg;
    cfg.n_pairs = total_paths / 2;

    std::printf("%zu assets, %llu paths, chunk %zu\n", n,
                static_cast<unsigned long long>(2 * cfg.n_pairs), cfg.chunk_size);

    quopt::SimConfig ref_cfg = cfg;
    const quopt::PricingResult reference = quopt::estimate_serial(state, vc, basket, ref_cfg);

    const double serial = run_timed("serial", 0, false, state, vc, basket, cfg, nullptr);
    for (int threads : {1, 2, 4, 8}) {
        char label[32];
        std::snprintf(label, sizeof label, "omp x%d", threads);
        const double t = run_timed(label, threads, true, state, vc, basket, cfg, &reference);
        std::printf("%-14s speedup vs serial: %.2fx\n", "", serial / t);
    }
    return 0;
}
