//! Microbenchmarks for the kernels the pipeline spends its time in. The
//! data regime mirrors real use: few samples, many features.

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "dmc/clustering.hpp"
#include "dmc/diffusion.hpp"
#include "dmc/matrix.hpp"
#include "dmc/preprocess.hpp"
#include "dmc/synth.hpp"

namespace {

dmc::DataMatrix random_data(std::size_t n, std::size_t p, std::uint64_t seed) {
    dmc::NormalStream rng(seed);
    dmc::Matrix m(n, p);
    for (auto& v : m.data()) v = rng.next();
    return dmc::DataMatrix(std::move(m));
}

void bm_pairwise_sq_dists(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto p = static_cast<std::size_t>(state.range(1));
    const auto workers = static_cast<unsigned>(state.range(2));
    const dmc::DataMatrix data = random_data(n, p, 1);
    for (auto _ : state) benchmark::DoNotOptimize(dmc::pairwise_sq_dists(data, workers));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n * (n - 1) / 2 * p));
}
BENCHMARK(bm_pairwise_sq_dists)
    ->Args({23, 5000, 1})
    ->Args({23, 5000, 4})
    ->Args({23, 200000, 1})
    ->Args({23, 200000, 4})
    ->Args({64, 5000, 4});

void bm_epsilon_scan(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto workers = static_cast<unsigned>(state.range(1));
    const dmc::SymmetricMatrix sq = dmc::pairwise_sq_dists(random_data(n, 50, 2));
    for (auto _ : state) benchmark::DoNotOptimize(dmc::epsilon_scan(sq, {}, 10, workers));
}
BENCHMARK(bm_epsilon_scan)->Args({23, 1})->Args({23, 4})->Args({64, 4});

void bm_sym_eig(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    dmc::NormalStream rng(3);
    dmc::SymmetricMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a.set(i, j, rng.next());
    for (auto _ : state) benchmark::DoNotOptimize(dmc::sym_eig(a));
}
BENCHMARK(bm_sym_eig)->Arg(8)->Arg(23)->Arg(64)->Arg(128);

void bm_diffusion_embed(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const dmc::SymmetricMatrix sq = dmc::pairwise_sq_dists(random_data(n, 50, 4));
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) mean += sq(i, j);
    mean /= static_cast<double>(n * (n - 1) / 2);
    const dmc::AffinityGraph graph = dmc::gaussian_affinity(sq, mean);
    for (auto _ : state) benchmark::DoNotOptimize(dmc::diffusion_embed(graph));
}
BENCHMARK(bm_diffusion_embed)->Arg(23)->Arg(64);

void bm_agglomerative(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const dmc::SymmetricMatrix d =
        dmc::sqrt_distances(dmc::pairwise_sq_dists(random_data(n, 20, 5)));
    for (auto _ : state)
        benchmark::DoNotOptimize(dmc::agglomerative(d, dmc::Linkage::average));
}
BENCHMARK(bm_agglomerative)->Arg(23)->Arg(128);

void bm_kmeans(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto p = static_cast<std::size_t>(state.range(1));
    const dmc::Matrix pts = random_data(n, p, 6).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(dmc::kmeans(pts, 2, 42, 10));
}
BENCHMARK(bm_kmeans)->Args({23, 5000})->Args({64, 500});

void bm_preset_chain(benchmark::State& state) {
    // The full in-memory analysis chain on the bundled dataset shape.
    const auto [data, truth] = dmc::make_dense_sparse(dmc::paper_preset(1));
    for (auto _ : state) {
        const dmc::DataMatrix working = dmc::signed_log_normalize(data);
        const dmc::SymmetricMatrix sq = dmc::pairwise_sq_dists(working);
        dmc::EpsilonScan scan = dmc::epsilon_scan(sq);
        const double eps = dmc::select_epsilon(scan);
        const dmc::AffinityGraph graph = dmc::gaussian_affinity(sq, eps);
        const dmc::SpectralResult sp = dmc::spectral_threshold(dmc::diffusion_embed(graph));
        benchmark::DoNotOptimize(sp);
    }
}
BENCHMARK(bm_preset_chain)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
