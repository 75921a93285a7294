#include <benchmark/benchmark.h>

#include <cmath>

#include "dbmlab/cutoff.hpp"
#include "dbmlab/dbm.hpp"
#include "dbmlab/gbe.hpp"
#include "dbmlab/noise.hpp"
#include "dbmlab/sao.hpp"

using namespace dbmlab;

static void BM_Drift(benchmark::State& state) {
  const auto N = static_cast<std::int64_t>(state.range(0));
  GbeSample s = sample_gbe(N, 2.0, 1);
  ParticleState st = state_from_values(std::move(s.values), 2.0);
  RegularizationConfig reg = RegularizationConfig::defaults(N);
  for (auto _ : state) {
    auto d = drift(st, reg);
    benchmark::DoNotOptimize(d);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Drift)->RangeMultiplier(2)->Range(64, 2048)->Complexity(benchmark::oNSquared);

// cutoff cost is O(K^2) and must not depend on N_effective
static void BM_CutoffDrift(benchmark::State& state) {
  const std::int64_t K = 128;
  const auto N = static_cast<std::int64_t>(state.range(0));
  RegularizationConfig reg = RegularizationConfig::defaults(N);
  EdgeWindow w = EdgeWindow::create(K, N, 2.0, reg, 0.5);
  auto x = sample_gbe_lowest(N, 2.0, 1, K);
  const double shift = 2.0 * std::pow(static_cast<double>(N), 2.0 / 3.0);
  for (auto& v : x) v += shift;
  for (auto _ : state) {
    auto d = cutoff_drift(x, w);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_CutoffDrift)->Arg(1 << 14)->Arg(1 << 18)->Arg(1 << 22);

static void BM_NoiseIncrement(benchmark::State& state) {
  NoiseSource noise(1, 1e-4);
  std::uint64_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(noise.increment(3, k++));
  }
}
BENCHMARK(BM_NoiseIncrement);

static void BM_GbeSample(benchmark::State& state) {
  const auto N = static_cast<std::int64_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto s = sample_gbe(N, 2.0, ++seed);
    benchmark::DoNotOptimize(s);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GbeSample)->RangeMultiplier(4)->Range(64, 1024)->Complexity();

static void BM_GbeLowest(benchmark::State& state) {
  const auto N = static_cast<std::int64_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto s = sample_gbe_lowest(N, 2.0, ++seed, 2);
    benchmark::DoNotOptimize(s);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GbeLowest)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void BM_SaoSample(benchmark::State& state) {
  SaoConfig cfg;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_tw(cfg, ++seed));
  }
}
BENCHMARK(BM_SaoSample);

BENCHMARK_MAIN();
