#include <benchmark/benchmark.h>

#include "twostage/experiments.hpp"
#include "twostage/integrators.hpp"
#include "twostage/stability.hpp"

using namespace twostage;

static void BM_TwoStageScalarStep(benchmark::State& state) {
  const auto p = stiff_nonlinear_problem();
  const ScalarState s(0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(step_two_stage_scalar(p, s, 1e-3, {0.5}));
}
BENCHMARK(BM_TwoStageScalarStep);

static void BM_Rk4ScalarStep(benchmark::State& state) {
  const auto p = stiff_nonlinear_problem();
  const ScalarState s(0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(step_rk4(p, s, 1e-3));
}
BENCHMARK(BM_Rk4ScalarStep);

static void BM_TwoStageLorenzStep(benchmark::State& state) {
  const auto inst = make_problem(ProblemId::Lorenz);
  const SystemState s(0.0, inst.u0);
  for (auto _ : state) benchmark::DoNotOptimize(step_two_stage_system(*inst.system, s, 0.01, 0.5));
}
BENCHMARK(BM_TwoStageLorenzStep);

static void BM_Rk4LorenzStep(benchmark::State& state) {
  const auto inst = make_problem(ProblemId::Lorenz);
  const SystemState s(0.0, inst.u0);
  for (auto _ : state) benchmark::DoNotOptimize(step_rk4(*inst.system, s, 0.01));
}
BENCHMARK(BM_Rk4LorenzStep);

static void BM_StabilityInterval(benchmark::State& state) {
  const double c = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(stability_interval(c));
}
BENCHMARK(BM_StabilityInterval)->Arg(0)->Arg(40)->Arg(50)->Arg(100);

static void BM_CoarseLocus(benchmark::State& state) {
  GridSpec g;
  g.nx = 181;
  g.ny = 201;
  for (auto _ : state) benchmark::DoNotOptimize(boundary_locus(0.5, g));
}
BENCHMARK(BM_CoarseLocus);
BENCHMARK_MAIN();
