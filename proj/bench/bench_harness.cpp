// Serial reference vs OpenMP kernels for random search and Monte Carlo bands.

#include <benchmark/benchmark.h>

#include "contact_opt/config.hpp"
#include "contact_opt/harness.hpp"

using namespace contact;

namespace {

ExperimentSpec quartic_spec() {
  ExperimentSpec spec = preset_spec("quartic", Scale::desk);
  spec.master_seed = 42;
  return spec;
}

const OptimizerEntry& crgd_entry(const ExperimentSpec& spec) { return spec.optimizers.back(); }

void BM_SearchSerial(benchmark::State& state) {
  const auto spec = quartic_spec();
  for (auto _ : state) benchmark::DoNotOptimize(random_search_serial(spec, crgd_entry(spec)).best_gap);
}

void BM_SearchParallel(benchmark::State& state) {
  const auto spec = quartic_spec();
  Execution exec;
  exec.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(random_search(spec, crgd_entry(spec), exec).best_gap);
}

void BM_MonteCarloSerial(benchmark::State& state) {
  auto spec = preset_spec("quadratic", Scale::desk);
  spec.master_seed = 42;
  const auto best = *random_search(spec, spec.optimizers.back()).best;
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_serial(spec, best).band.median.back());
}

void BM_MonteCarloParallel(benchmark::State& state) {
  auto spec = preset_spec("quadratic", Scale::desk);
  spec.master_seed = 42;
  const auto best = *random_search(spec, spec.optimizers.back()).best;
  Execution exec;
  exec.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(spec, best, exec).band.median.back());
}

}  // namespace

BENCHMARK(BM_SearchSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SearchParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MonteCarloSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MonteCarloParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
