// Serial reference vs OpenMP kernels on the three parallel workloads.

#include <benchmark/benchmark.h>

#include "ipred/arma.hpp"
#include "ipred/correlation.hpp"
#include "ipred/evaluation.hpp"
#include "ipred/network_sim.hpp"
#include "ipred/scenarios.hpp"

using namespace ipred;

namespace {

ScenarioConfig bench_config() {
  ScenarioConfig c = setup_config(1);
  c.realizations = 16;
  return c;
}

void BM_SimulateSerial(benchmark::State& state) {
  const auto c = bench_config();
  for (auto _ : state) benchmark::DoNotOptimize(simulate_serial(c, 0, c.realizations));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(c.realizations));
}

void BM_SimulateParallel(benchmark::State& state) {
  const auto c = bench_config();
  for (auto _ : state) benchmark::DoNotOptimize(simulate_parallel(c, 0, c.realizations));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(c.realizations));
}

void BM_SelectOrderSerial(benchmark::State& state) {
  const auto rho = interference_autocorr(setup_config(1).params, 240);
  for (auto _ : state) benchmark::DoNotOptimize(select_order_serial(rho));
}

void BM_SelectOrderParallel(benchmark::State& state) {
  const auto rho = interference_autocorr(setup_config(1).params, 240);
  for (auto _ : state) benchmark::DoNotOptimize(select_order(rho));
}

void BM_EvaluateSerial(benchmark::State& state) {
  const auto c = bench_config();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_scenario_serial("bench", c));
}

void BM_EvaluateParallel(benchmark::State& state) {
  const auto c = bench_config();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_scenario("bench", c));
}

}  // namespace

BENCHMARK(BM_SimulateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SelectOrderSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SelectOrderParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
