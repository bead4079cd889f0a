#include <benchmark/benchmark.h>

#include "covpart/baselines.hpp"
#include "covpart/covariance.hpp"
#include "covpart/general.hpp"
#include "covpart/pinning.hpp"
#include "support/generators.hpp"

namespace {

covpart::EmpiricalDistribution sphere_bench(int n, int m) {
  std::mt19937_64 rng = covpart::make_rng(20240801);
  return covpart::EmpiricalDistribution::from_rows(gen::sphere_rows(n, m, rng));
}

void BM_Covariance(benchmark::State& state) {
  const auto dist = sphere_bench(static_cast<int>(state.range(0)), 32);
  for (auto _ : state)
    benchmark::DoNotOptimize(covpart::covariance(dist).entries.sum());
}
BENCHMARK(BM_Covariance)->Arg(256)->Arg(2048)->Unit(benchmark::kMicrosecond);

void BM_GeneralPartition(benchmark::State& state) {
  const auto dist = sphere_bench(2048, 32);
  covpart::GeneralConfig cfg;
  cfg.k = static_cast<int>(state.range(0));
  cfg.seed = 1;
  for (auto _ : state) {
    auto result = covpart::build_partition(dist, cfg);
    benchmark::DoNotOptimize(result.report.loss_frobenius);
  }
}
BENCHMARK(BM_GeneralPartition)->Arg(8)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_PinPartition(benchmark::State& state) {
  std::mt19937_64 rng = covpart::make_rng(7);
  const auto dist = gen::correlated_boolean(1024, 16, 1, rng);
  covpart::PinningConfig cfg{static_cast<int>(state.range(0)), 1, 16};
  for (auto _ : state) {
    auto result = covpart::pin_partition(dist, cfg);
    benchmark::DoNotOptimize(result.report.loss_frobenius);
  }
}
BENCHMARK(BM_PinPartition)->Arg(16)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_KMeansPartition(benchmark::State& state) {
  const auto dist = sphere_bench(2048, 32);
  for (auto _ : state) {
    auto part = covpart::kmeans_partition(dist, 64, 3);
    benchmark::DoNotOptimize(part.cell_count());
  }
}
BENCHMARK(BM_KMeansPartition)->Unit(benchmark::kMillisecond);

void BM_BruteForceOracle(benchmark::State& state) {
  std::mt19937_64 rng = covpart::make_rng(9);
  const auto dist = gen::ball_distribution(8, 3, rng, true);
  for (auto _ : state)
    benchmark::DoNotOptimize(covpart::brute_force_optimal(dist, 3).loss);
}
BENCHMARK(BM_BruteForceOracle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
