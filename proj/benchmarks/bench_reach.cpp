#include <benchmark/benchmark.h>

#include <random>

#include "nnmr/acc.hpp"
#include "nnmr/nn_reach.hpp"
#include "nnmr/ode_reach.hpp"
#include "nnmr/reduction.hpp"

namespace {

using namespace nnmr;

IntervalBox controller_input_box() {
  Eigen::VectorXd lo(5), hi(5);
  lo << 30.0, 1.4, 28.0, 70.0, -4.0;
  hi << 30.0, 1.4, 34.0, 90.0, 1.0;
  return IntervalBox(std::move(lo), std::move(hi));
}

Network wide_controller() { return acc_reference_controller({}); }

Network narrow_controller() {
  AccScenarioOptions opts;
  opts.hidden_layers = 2;
  opts.hidden_width = 5;
  return acc_reference_controller(opts);
}

void BM_ReachWideController(benchmark::State& state) {
  const Network net = wide_controller();
  const IntervalBox input = controller_input_box();
  const auto cfg = PartitionConfig::uniform_splits(
      {1, 1, static_cast<int>(state.range(0)),
       static_cast<int>(state.range(0)), 1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(reach_nn(net, input, cfg));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ReachWideController)->RangeMultiplier(2)->Range(4, 32);

void BM_ReachNarrowController(benchmark::State& state) {
  const Network net = narrow_controller();
  const IntervalBox input = controller_input_box();
  const auto cfg = PartitionConfig::uniform_splits(
      {1, 1, static_cast<int>(state.range(0)),
       static_cast<int>(state.range(0)), 1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(reach_nn(net, input, cfg));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ReachNarrowController)->RangeMultiplier(2)->Range(4, 32);

void BM_PrecisionToyPair(benchmark::State& state) {
  const Network full = wide_controller();
  const Network reduced = narrow_controller();
  const IntervalBox input = controller_input_box();
  const auto cfg = PartitionConfig::uniform_splits(
      {1, 1, static_cast<int>(state.range(0)),
       static_cast<int>(state.range(0)), 1});
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_precision(full, reduced, input, cfg));
  }
}
BENCHMARK(BM_PrecisionToyPair)->RangeMultiplier(2)->Range(16, 64);

void BM_ValidatedAccStep(benchmark::State& state) {
  const Dynamics plant = acc_dynamics();
  Eigen::VectorXd lo(6), hi(6);
  lo << 94.0, 30.0, 0.0, 10.0, 30.0, 0.0;
  hi << 96.0, 30.2, 0.0, 11.0, 30.2, 0.0;
  const IntervalBox x0(std::move(lo), std::move(hi));
  const IntervalBox u(Eigen::Vector2d(-2.0, -1.0), Eigen::Vector2d(-2.0, 2.0));
  StepConfig cfg;
  cfg.dt = 0.0025;
  for (auto _ : state) {
    benchmark::DoNotOptimize(reach_ode_x(plant, u, x0, 0.01, cfg));
  }
}
BENCHMARK(BM_ValidatedAccStep);

}  // namespace

BENCHMARK_MAIN();
