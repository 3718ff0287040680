#include <benchmark/benchmark.h>

#include "qsearch/kernels.hpp"
#include "qsearch/search.hpp"

using namespace qsearch;
using kernels::Exec;

namespace {

const ModelParams kParams = ModelParams::make(0.03, 0.5);

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_TerminalValues(benchmark::State& state) {
    const SimGrid grid{1e-3, 1.0, 1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            kernels::terminal_values(kParams, {kernels::PathKind::reflected, 0.5, 0.0}, grid, 2000, exec_of(state)));
    }
    state.SetItemsProcessed(state.iterations() * 2000);
    label(state);
}

void BM_ReflectedStops(benchmark::State& state) {
    const SimGrid grid{1e-3, 1.0, 1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::reflected_stops(kParams, 0.8, grid, 1000, exec_of(state)));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
    label(state);
}

void BM_CoupledStats(benchmark::State& state) {
    const SimGrid grid{1e-3, 1.0, 1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::coupled_stats(kParams, 0.02, grid, 1000, exec_of(state)));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
    label(state);
}

void BM_SearchTrials(benchmark::State& state) {
    const auto cfg = make_strategy(kParams, solve_threshold(kParams), 0.05, 1e-3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(search_trials(kParams, cfg, 500, 1, exec_of(state)));
    }
    state.SetItemsProcessed(state.iterations() * 500);
    label(state);
}

}  // namespace

BENCHMARK(BM_TerminalValues)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReflectedStops)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoupledStats)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchTrials)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
