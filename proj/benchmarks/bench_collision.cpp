#include <benchmark/benchmark.h>

#include <random>

#include "wavekin/collision.hpp"
#include "wavekin/evolve.hpp"

using namespace wavekin;

namespace {

KernelModel baseline() {
    return KernelModel(DispersionLaw{0.25, 1.0}, KernelExponents{},
                       CouplingConstants{1, 1, 1});
}

SpectralState dense_state(const GridPtr& g) {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> mass(0.1, 1.0);
    SpectralState s = SpectralState::zero(g);
    for (auto& m : s.masses) m = mass(rng);
    return s;
}

}  // namespace

static void BM_BuildTables(benchmark::State& state) {
    const auto g = std::make_shared<FrequencyGrid>(
        FrequencyGrid::make(GridKind::geometric, 1.0, 65536.0, state.range(0)));
    for (auto _ : state) {
        auto t = CollisionTables::build(g, baseline(), {});
        benchmark::DoNotOptimize(t);
    }
}
BENCHMARK(BM_BuildTables)->Arg(64)->Arg(128)->Arg(256);

static void BM_Apply(benchmark::State& state) {
    const auto g = std::make_shared<FrequencyGrid>(
        FrequencyGrid::make(GridKind::geometric, 1.0, 65536.0, state.range(0)));
    const auto t = CollisionTables::build(g, baseline(), {});
    const SpectralState s = dense_state(g);
    for (auto _ : state) {
        RateResult r = apply(s, t);
        benchmark::DoNotOptimize(r);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Apply)->Arg(16)->Arg(32)->Arg(64)->Arg(128)->Complexity(benchmark::oNCubed);

static void BM_ApplyPairChannelOnly(benchmark::State& state) {
    const auto g = std::make_shared<FrequencyGrid>(
        FrequencyGrid::make(GridKind::geometric, 1.0, 65536.0, state.range(0)));
    const auto t = CollisionTables::build(g, baseline(), {false, true, false, true});
    const SpectralState s = dense_state(g);
    for (auto _ : state) {
        RateResult r = apply(s, t);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_ApplyPairChannelOnly)->Arg(32)->Arg(64)->Arg(128);

static void BM_WeakEval(benchmark::State& state) {
    const auto g = std::make_shared<FrequencyGrid>(
        FrequencyGrid::make(GridKind::geometric, 1.0, 65536.0, state.range(0)));
    const auto t = CollisionTables::build(g, baseline(), {});
    const SpectralState s = dense_state(g);
    for (auto _ : state) {
        auto v = weak_eval(s, t, [](double w) { return w; });
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_WeakEval)->Arg(16)->Arg(32)->Arg(64);

static void BM_Step(benchmark::State& state) {
    const auto g = std::make_shared<FrequencyGrid>(
        FrequencyGrid::make(GridKind::geometric, 1.0, 65536.0, state.range(0)));
    const auto t = CollisionTables::build(g, baseline(), {});
    const SpectralState s = dense_state(g);
    StepControl ctl;
    ctl.dt_init = ctl.dt_max = 1e-6;
    ctl.dt_min = 1e-18;
    ctl.t_end = 1.0;
    for (auto _ : state) {
        auto out = step(s, t, ctl, 1e9);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_Step)->Arg(64)->Arg(128);

static void BM_Moments(benchmark::State& state) {
    const auto g = std::make_shared<FrequencyGrid>(
        FrequencyGrid::make(GridKind::geometric, 1.0, 65536.0, 256));
    const SpectralState s = dense_state(g);
    for (auto _ : state) {
        Moments m = moments(s);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_Moments);

BENCHMARK_MAIN();
