// Kernel benchmarks: OpenMP-parallel paths against their serial references.
// Not part of ctest; run build/benchmarks/bench_kernels directly.

#include <benchmark/benchmark.h>

#include "rsf/forest.hpp"
#include "rsf/graph_gen.hpp"

using namespace rsf;

namespace {

const Graph& grid_graph() {
    static Graph g = grid2d(100, 100, true);
    return g;
}

Signal make_signal(std::int32_t n) {
    Rng rng(5, 1);
    Signal z(n);
    for (auto& v : z) v = rng.normal();
    return z;
}

void bm_laplacian_serial(benchmark::State& state) {
    const Graph& g = grid_graph();
    Signal z = make_signal(g.num_nodes()), out(g.num_nodes());
    for (auto _ : state) {
        laplacian_apply_serial(g, z, out);
        benchmark::DoNotOptimize(out.data());
        benchmark::ClobberMemory();
    }
}
BENCHMARK(bm_laplacian_serial);

void bm_laplacian_parallel(benchmark::State& state) {
    const Graph& g = grid_graph();
    Signal z = make_signal(g.num_nodes()), out(g.num_nodes());
    for (auto _ : state) {
        laplacian_apply(g, z, out);
        benchmark::DoNotOptimize(out.data());
        benchmark::ClobberMemory();
    }
}
BENCHMARK(bm_laplacian_parallel);

void bm_ensemble_serial(benchmark::State& state) {
    const Graph& g = grid_graph();
    const DiagQ q = DiagQ::scalar(g.num_nodes(), 1.0);
    Signal y = make_signal(g.num_nodes());
    for (auto _ : state) {
        auto ens = build_ensemble_serial(g, q, y.data(), 1, Estimator::bar, 8, 3);
        benchmark::DoNotOptimize(ens.count());
    }
}
BENCHMARK(bm_ensemble_serial);

void bm_ensemble_parallel(benchmark::State& state) {
    const Graph& g = grid_graph();
    const DiagQ q = DiagQ::scalar(g.num_nodes(), 1.0);
    Signal y = make_signal(g.num_nodes());
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto ens = build_ensemble(g, q, y.data(), 1, Estimator::bar, 8, 3, threads);
        benchmark::DoNotOptimize(ens.count());
    }
}
BENCHMARK(bm_ensemble_parallel)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
