#include <benchmark/benchmark.h>

#include "nsopt/detection.hpp"
#include "nsopt/harness.hpp"

namespace nsopt {
namespace {

SampleWindow stationary_epoch(std::size_t n) {
  Rng rng(1);
  SampleWindow w;
  for (std::size_t i = 0; i < n; ++i) w.append(rng.uniform());
  return w;
}

void BM_Detect(benchmark::State& state, CandidateGrid grid) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto epoch = stationary_epoch(n);
  DetectionConfig cfg;
  cfg.horizon = n;
  cfg.grid = grid;
  for (auto _ : state) benchmark::DoNotOptimize(detect(epoch, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_Detect, all, CandidateGrid::All)->RangeMultiplier(4)->Range(256, 16384)->Complexity();
BENCHMARK_CAPTURE(BM_Detect, geometric, CandidateGrid::Geometric)
    ->RangeMultiplier(4)
    ->Range(256, 16384)
    ->Complexity();

void BM_KsDistance(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = stationary_epoch(n);
  const auto b = stationary_epoch(n / 2 + 1);
  for (auto _ : state) benchmark::DoNotOptimize(ks_distance(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KsDistance)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_Run(benchmark::State& state, const char* policy) {
  const auto T = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const auto inst = make_hard_instance(InstanceFamily::Switch, T, 4, rng);
  const auto spec = parse_policy_spec(policy);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(inst.sequence, spec, spec.channel(), seed++).total_cost());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_Run, nsaa, "nsaa")->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Run, censored, "nsaa-censored")->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace nsopt

BENCHMARK_MAIN();
