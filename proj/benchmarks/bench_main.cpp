#include "hsf/four_simplex.hpp"
#include "hsf/hypergeom.hpp"
#include "hsf/hypergraph.hpp"
#include "hsf/reduction.hpp"

#include <benchmark/benchmark.h>

using namespace hsf;

static void BM_FindSimplex(benchmark::State& state) {
    auto inst = planted_instance(static_cast<int>(state.range(0)), 3, 0.3, 1);
    for (auto _ : state) {
        OracleView view(inst.graph);
        benchmark::DoNotOptimize(find_simplex(view));
    }
}
BENCHMARK(BM_FindSimplex)->Arg(12)->Arg(20)->Arg(30);

static void BM_ReductionTrials(benchmark::State& state) {
    auto in = single_planted_input(12, 2, 7);
    for (auto _ : state) benchmark::DoNotOptimize(run_reduction_trials(in, state.range(0), 7));
}
BENCHMARK(BM_ReductionTrials)->Arg(1000);

static void BM_StageExponents(benchmark::State& state) {
    auto p = ParamSet::published();
    for (auto _ : state) benchmark::DoNotOptimize(stage_exponents(p));
}
BENCHMARK(BM_StageExponents);

static void BM_SolveLp(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(solve_lp());
}
BENCHMARK(BM_SolveLp)->Unit(benchmark::kMillisecond);

static void BM_ExactTail(benchmark::State& state) {
    HyperGeom h(state.range(0), state.range(0) / 10, state.range(0) / 5);
    for (auto _ : state) benchmark::DoNotOptimize(exact_tail(h, h.K / 10 + 2));
}
BENCHMARK(BM_ExactTail)->Arg(100)->Arg(1000);
BENCHMARK_MAIN();
