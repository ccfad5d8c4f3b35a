#include <benchmark/benchmark.h>

#include "jointdesc/behavior.hpp"
#include "jointdesc/duplication.hpp"
#include "jointdesc/induction.hpp"
#include "jointdesc/membership.hpp"
#include "jointdesc/quantum.hpp"
#include "jointdesc/random.hpp"

using namespace jointdesc;

namespace {

void BM_CheckLd(benchmark::State& state) {
    const auto s = ScenarioDescriptor::binary(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
    Rng rng(1);
    const Behavior b = random_rational_behavior(s, rng);
    for (auto _ : state) benchmark::DoNotOptimize(check_ld(b).feasible());
}
BENCHMARK(BM_CheckLd)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_CheckLf(benchmark::State& state) {
    const auto s = ScenarioDescriptor::binary(3, 3, true);
    Rng rng(2);
    const Behavior b = random_rational_behavior(s, rng);
    for (auto _ : state) benchmark::DoNotOptimize(check_lf(b).feasible());
}
BENCHMARK(BM_CheckLf)->Unit(benchmark::kMillisecond);

void BM_BornBehavior(benchmark::State& state) {
    EwfsProtocol p;
    p.initial = PureState::schmidt(0.6);
    p.alice_angles = {0.3, 1.4};
    p.bob_angles = {0.2, 0.9, 2.1};
    for (auto _ : state) benchmark::DoNotOptimize(born_behavior(p));
}
BENCHMARK(BM_BornBehavior)->Unit(benchmark::kMicrosecond);

void BM_EstimateM(benchmark::State& state) {
    ToyMachineConfig cfg;
    cfg.max_length = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(estimate_M("0110", cfg).mass);
}
BENCHMARK(BM_EstimateM)->Arg(10)->Arg(14)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_SimulateBetting(benchmark::State& state) {
    const auto e = DuplicationExperiment::make(200, 2);
    for (auto _ : state) benchmark::DoNotOptimize(simulate_betting(e, 1000, 1).freya_profit.mean);
}
BENCHMARK(BM_SimulateBetting)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
