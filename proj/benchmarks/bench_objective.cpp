#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "ebell/search.hpp"

namespace {

using namespace ebell;

std::vector<double> random_angles(std::size_t n, std::uint64_t seed) {
  auto rng = derived_stream(seed, 0);
  std::vector<double> x(n);
  for (auto& a : x) a = 2.0 * std::numbers::pi * uniform01(rng);
  return x;
}

void BM_Objective(benchmark::State& state) {
  const auto ek = state.range(0) == 0 ? EntropyKind::shannon() : EntropyKind::tsallis(2.5);
  const ViolationObjective obj({0.5, 0.95, 3}, DistanceKind::D1, ek);
  const auto x = random_angles(obj.num_parameters(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(obj(x));
}
BENCHMARK(BM_Objective)->Arg(0)->Arg(1)->ArgName("tsallis");

void BM_EvaluateQuadrangle(benchmark::State& state) {
  const ViolationObjective obj({0.5, 0.95, 3}, DistanceKind::D1, EntropyKind::shannon());
  const auto settings = obj.settings_from(random_angles(obj.num_parameters(), 2));
  const auto rho = make_state({0.5, 0.95, 3});
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate_quadrangle(rho, settings, DistanceKind::D1,
                                                 EntropyKind::shannon()));
}
BENCHMARK(BM_EvaluateQuadrangle);

void BM_JointDistribution(benchmark::State& state) {
  const auto rho = make_state({1.0, 0.9, 3});
  const auto angles = random_angles(12, 3);
  const auto a = PhaseSettings::from_angles(3, std::span(angles).first(6));
  const auto b = PhaseSettings::from_angles(3, std::span(angles).last(6));
  for (auto _ : state) benchmark::DoNotOptimize(joint_distribution(rho, a, b));
}
BENCHMARK(BM_JointDistribution);

void BM_SingleRestart(benchmark::State& state) {
  OptimizerConfig config;
  config.restarts = 1;
  for (auto _ : state) {
    config.seed++;
    benchmark::DoNotOptimize(
        minimize_violation({1.0, 1.0, 3}, DistanceKind::D1, EntropyKind::shannon(), config));
  }
}
BENCHMARK(BM_SingleRestart)->Unit(benchmark::kMillisecond);

void BM_TriangleSearch(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        triangle_counterexample(EntropyKind::tsallis(2.0), DistanceKind::D1, 1000, 1));
}
BENCHMARK(BM_TriangleSearch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
