#include <benchmark/benchmark.h>

#include <omp.h>

#include <vector>

#include "mondrian/estimation.hpp"
#include "mondrian/rng.hpp"

using namespace mondrian;

namespace {

const Rect kWindow(0, 10, 0, 10);

std::vector<WeightedPoint> uniform_points(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<WeightedPoint> pts(n);
    for (auto& pt : pts)
        pt = {kWindow.x_min() + kWindow.width() * rng.uniform_open(),
              kWindow.y_min() + kWindow.height() * rng.uniform_open(), 1.0};
    return pts;
}

PairQuery query() { return {kWindow, Weight(0.6), {0.25, 0.5, 1.0, 2.0}}; }

void BM_PairsBruteforce(benchmark::State& state) {
    const auto pts = uniform_points(static_cast<std::size_t>(state.range(0)), 1);
    const auto q = query();
    for (auto _ : state) benchmark::DoNotOptimize(pair_sums_bruteforce(q, pts, pts, true));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PairsGridSerial(benchmark::State& state) {
    const auto pts = uniform_points(static_cast<std::size_t>(state.range(0)), 1);
    const auto q = query();
    for (auto _ : state) benchmark::DoNotOptimize(pair_sums_grid(q, pts, pts, true, 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PairsGridParallel(benchmark::State& state) {
    const auto pts = uniform_points(static_cast<std::size_t>(state.range(0)), 1);
    const auto q = query();
    const int threads = omp_get_max_threads();
    for (auto _ : state) benchmark::DoNotOptimize(pair_sums_grid(q, pts, pts, true, threads));
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.counters["threads"] = threads;
}

void BM_ReplicateBatch(benchmark::State& state) {
    McConfig cfg{kWindow, SimParams(Weight(0.5), 2.0, 0), 64, {0.5, 1.0, 2.0}};
    cfg.master_seed = 7;
    cfg.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(k_functions(cfg, {KKind::Vertex, KKind::Edge}));
}

}  // namespace

BENCHMARK(BM_PairsBruteforce)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairsGridSerial)->Arg(1000)->Arg(4000)->Arg(32000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairsGridParallel)->Arg(1000)->Arg(4000)->Arg(32000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ReplicateBatch)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
