#include <benchmark/benchmark.h>

#include "dframe/maps.hpp"
#include "dframe/multiplier.hpp"

using namespace dframe;

namespace {

struct Fixture {
  SpacePtr space;
  ModelPtr model;
  DistributionMap omega;
  Symbol m;
};

Fixture make(std::size_t n) {
  auto space = std::make_shared<const SampledMeasureSpace>(SampledMeasureSpace::periodic_unit(n));
  auto model = std::make_shared<const ModelSpace>(make_model(space, RawSamples{}));
  auto omega = exponential_frame(model, space);
  auto m = Symbol::random_phase(*space, 7);
  return {space, model, omega, m};
}

void BM_Build(benchmark::State& state) {
  const auto f = make(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build(f.m, f.omega, f.omega));
  state.SetComplexityN(state.range(0));
}

void BM_Diagnose(benchmark::State& state) {
  const auto f = make(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(diagnose(f.omega));
  state.SetComplexityN(state.range(0));
}

void BM_OperatorNorm(benchmark::State& state) {
  const auto f = make(static_cast<std::size_t>(state.range(0)));
  const auto M = build(f.m, f.omega, f.omega);
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(M));
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_Build)->RangeMultiplier(2)->Range(16, 512)->Complexity();
BENCHMARK(BM_Diagnose)->RangeMultiplier(2)->Range(16, 512)->Complexity();
BENCHMARK(BM_OperatorNorm)->RangeMultiplier(2)->Range(16, 512)->Complexity();

BENCHMARK_MAIN();
