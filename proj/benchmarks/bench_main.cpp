#include <benchmark/benchmark.h>

#include <memory>

#include "stablekernel/density.hpp"
#include "stablekernel/drift.hpp"
#include "stablekernel/montecarlo.hpp"
#include "stablekernel/nonlocal.hpp"
#include "stablekernel/parametrix.hpp"
#include "stablekernel/presets.hpp"
#include "stablekernel/rho.hpp"
#include "stablekernel/symbol.hpp"

namespace sk = stablekernel;

static void BM_SymbolPoint(benchmark::State& state) {
    const auto spec = sk::sinusoidal_model(1.5);
    double u = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sk::eval_symbol(spec, {0.3, 0.0}, {u, 0.0}));
        u += 1e-3;
    }
}
BENCHMARK(BM_SymbolPoint);

static void BM_InvertDensity(benchmark::State& state) {
    const auto spec = sk::constant_model(1.5);
    const auto grid = sk::make_grid(1, 64.0, static_cast<int>(state.range(0)), {0.25, 0.5, 1.0});
    for (auto _ : state) benchmark::DoNotOptimize(sk::invert_density(spec, {0.0, 0.0}, grid));
}
BENCHMARK(BM_InvertDensity)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);

static void BM_FrozenOperator(benchmark::State& state) {
    const auto spec = sk::sinusoidal_model(1.5);
    const auto grid = sk::make_grid(1, 64.0, 1024, {1.0});
    const auto f = sk::invert_density(spec, {0.0, 0.0}, grid);
    const sk::OperatorStencil st(sk::frozen_slice(spec, {0.0, 0.0}), spec.alpha, grid);
    const auto op = sk::prepare_operand(f.column(0), grid.extent);
    for (auto _ : state) benchmark::DoNotOptimize(st.apply_all(op));
}
BENCHMARK(BM_FrozenOperator)->Unit(benchmark::kMillisecond);

static void BM_Parametrix(benchmark::State& state) {
    const auto spec = sk::sinusoidal_model(1.5);
    const auto grid = sk::default_parametrix_grid(spec, static_cast<int>(state.range(0)), 20);
    for (auto _ : state) benchmark::DoNotOptimize(sk::run_parametrix(spec, grid));
}
BENCHMARK(BM_Parametrix)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_DriftSeries(benchmark::State& state) {
    const auto spec = sk::make_preset("sinusoidal-drift");
    auto run = std::make_shared<sk::ParametrixRun>(sk::run_parametrix(spec, sk::default_parametrix_grid(spec, 32, 20)));
    for (auto _ : state) {
        auto st = sk::make_drift_state(run);
        benchmark::DoNotOptimize(sk::build_drift_series(st));
    }
}
BENCHMARK(BM_DriftSeries)->Unit(benchmark::kMillisecond);

static void BM_SimulatePaths(benchmark::State& state) {
    const auto cfg = sk::make_sim_config(sk::sinusoidal_model(1.5), 1000, 1);
    for (auto _ : state) benchmark::DoNotOptimize(sk::simulate_paths(cfg, {0.0, 0.0}, 1.0));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SimulatePaths)->Unit(benchmark::kMillisecond);

static void BM_RhoSpaceTime(benchmark::State& state) {
    const auto spec = sk::constant_model(1.5);
    const sk::RhoTuple tuple{sk::RhoInequality::space_time_convolution, {1.5, 0.0}, {0.375, 0.0}};
    sk::RhoGrid g;
    g.n_t = 2;
    g.n_x = 2;
    for (auto _ : state) benchmark::DoNotOptimize(sk::rho_constant(spec, tuple, g));
}
BENCHMARK(BM_RhoSpaceTime)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
