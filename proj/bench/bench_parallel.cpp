// Serial vs OpenMP timings for the three parallel loops.

#include <benchmark/benchmark.h>

#include "oneshot/experiment_harness.hpp"

using namespace oneshot;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_ResolventConstant(benchmark::State& state) {
  const LinearProblem p = random_contraction(40, 2, 4, 0.9, 1);
  for (auto _ : state) benchmark::DoNotOptimize(resolvent_constant(p.B(), {720, mode(state)}));
}
BENCHMARK(BM_ResolventConstant)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  HelmholtzOptions opt;
  opt.grid = 10;
  const LinearProblem p = helmholtz_toy(opt);
  const RunSetup setup = default_setup(p);
  const auto cells = sweep_grid({MethodKind::UsualGD, MethodKind::KStepOneShot, MethodKind::ShiftedKStepOneShot},
                                {1, 2, 4}, {0.01, 0.05});
  SweepOptions so;
  so.execution = mode(state);
  so.solver.max_outer = 300;
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(p, setup, cells, so));
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ScalarRegion(benchmark::State& state) {
  std::vector<double> grid;
  for (int i = -990; i <= 990; ++i) grid.push_back(i / 1000.0);
  for (auto _ : state) benchmark::DoNotOptimize(scalar_region(grid, {1, 2, 3, 5, 8, 13, 21}, mode(state)));
}
BENCHMARK(BM_ScalarRegion)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
