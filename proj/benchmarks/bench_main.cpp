#include <benchmark/benchmark.h>

#include <numbers>

#include "fdtrfit/forward_fdtr.hpp"
#include "fdtrfit/local_opt.hpp"
#include "fdtrfit/objective.hpp"
#include "fdtrfit/test_functions.hpp"

using namespace fdtrfit;

namespace {

SampleStack gan_si_truth() {
  auto [stack, space, binding] = build_gan_si_stack();
  return resolve(stack, binding, space, GanSiTruth{}.as_vector());
}

void BM_FoldImpedance(benchmark::State& state) {
  const SampleStack s = gan_si_truth();
  const double omega = 2 * std::numbers::pi * 1e6;
  double lambda = 1e5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fold_impedance(s, lambda, omega));
    lambda = lambda < 1e6 ? lambda * 1.001 : 1e5;
  }
}
BENCHMARK(BM_FoldImpedance);

void BM_SurfaceResponse(benchmark::State& state) {
  const SampleStack s = gan_si_truth();
  const SpotConfig spot = SpotConfig::same(kGanSiSpotSmall);
  QuadratureSpec q;
  q.node_count = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(surface_response(s, spot, 1e6, q));
}
BENCHMARK(BM_SurfaceResponse)->Arg(100)->Arg(200)->Arg(400);

void BM_GanSiFitness(benchmark::State& state) {
  const FitProblem p = make_gan_si_problem();
  const auto x = p.space().to_scaled(GanSiTruth{}.as_vector());
  for (auto _ : state) benchmark::DoNotOptimize(p.fitness(x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.residual_count()));
}
BENCHMARK(BM_GanSiFitness)->Unit(benchmark::kMicrosecond);

void BM_GridY(benchmark::State& state) {
  const auto y = benchmark_y();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(grid_enumerate(y, n, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_GridY)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_BfgsZ(benchmark::State& state) {
  const ObjectiveFn z = [](std::span<const double> x) { return eval_Z(x[0], x[1]); };
  const std::vector<double> x0{1.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(bfgs_minimize(z, x0));
}
BENCHMARK(BM_BfgsZ);

}  // namespace

BENCHMARK_MAIN();
