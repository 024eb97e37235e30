#include <benchmark/benchmark.h>
#include "ermlab/classes.hpp"
#include "ermlab/projections.hpp"
#include "ermlab/rng.hpp"

namespace {

void BM_Pava(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  ermlab::Rng rng(7);
  const ermlab::Vector y = rng.gaussian_vector(n);
  for (auto _ : state) benchmark::DoNotOptimize(ermlab::pava(y));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Pava)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_IsotonicProject(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const auto cls = ermlab::make_isotonic(n);
  ermlab::Rng rng(7);
  const ermlab::Vector y = rng.gaussian_vector(n);
  for (auto _ : state) benchmark::DoNotOptimize(cls->project(y));
}
BENCHMARK(BM_IsotonicProject)->RangeMultiplier(4)->Range(64, 4096);

void BM_LipschitzProject(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const auto design = ermlab::DesignSet::grid_1d(n);
  const auto cls = ermlab::make_lipschitz(design, 1.0, 1.0);
  ermlab::Rng rng(7);
  const ermlab::Vector y = 0.5 * rng.gaussian_vector(n);
  for (auto _ : state) benchmark::DoNotOptimize(cls->project(y));
}
BENCHMARK(BM_LipschitzProject)->RangeMultiplier(2)->Range(16, 128);

void BM_BallProject(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const auto cls = ermlab::make_ball(ermlab::Vector::Zero(n), 1.0);
  ermlab::Rng rng(7);
  const ermlab::Vector y = rng.gaussian_vector(n);
  for (auto _ : state) benchmark::DoNotOptimize(cls->project(y));
}
BENCHMARK(BM_BallProject)->RangeMultiplier(4)->Range(64, 16384);

}  // namespace

BENCHMARK_MAIN();
