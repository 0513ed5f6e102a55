// Microbenchmarks for the kernels that dominate experiment runtime: the SVD,
// spectral shrinkage, power iteration, observation accumulation, synthetic
// matrix generation, and the full oracle grid sweep.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "smoothmc/estimator.hpp"
#include "smoothmc/manifold.hpp"
#include "smoothmc/matrix.hpp"
#include "smoothmc/rng.hpp"
#include "smoothmc/sampling.hpp"

namespace {

using namespace smoothmc;

Matrix random_matrix(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = rng.next_gaussian();
  }
  return m;
}

void BM_Svd(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix m = random_matrix(n, n, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(svd(m));
  }
}
BENCHMARK(BM_Svd)->Arg(100)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_SoftThreshold(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix m = random_matrix(n, n, 13);
  const double tau = 0.5 * singular_values(m)(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(soft_threshold_svd(m, tau));
  }
}
BENCHMARK(BM_SoftThreshold)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_OperatorNormPowerIteration(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix m = random_matrix(n, n, 17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(operator_norm(m));
  }
}
BENCHMARK(BM_OperatorNormPowerIteration)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_OperatorNormViaSvd(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix m = random_matrix(n, n, 17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(singular_values(m)(0));
  }
}
BENCHMARK(BM_OperatorNormViaSvd)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_BuildR(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(19);
  const auto [m, spec] = generate_matrix(n, n, 1, 1, 50, rng);
  const auto budget = static_cast<std::int64_t>(0.7 * static_cast<double>(n) * static_cast<double>(n));
  const auto masks = sample_masks(n, n, budget, SamplingMode::without_replacement, rng);
  const ObservationSet obs = observe(m, masks, 1.0, rng, SamplingMode::without_replacement);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_R(obs));
  }
}
BENCHMARK(BM_BuildR)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_GenerateMatrix(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(++seed);
    benchmark::DoNotOptimize(generate_matrix(n, n, 3, 1, 100, rng));
  }
}
BENCHMARK(BM_GenerateMatrix)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_OracleGridSweep(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(23);
  const auto [m, spec] = generate_matrix(n, n, 1, 1, 100, rng);
  const auto budget = static_cast<std::int64_t>(0.7 * static_cast<double>(n) * static_cast<double>(n));
  const auto masks = sample_masks(n, n, budget, SamplingMode::without_replacement, rng);
  const ObservationSet obs = observe(m, masks, 1.0, rng, SamplingMode::without_replacement);
  const LambdaGrid grid = LambdaGrid::default_grid(n, n, budget);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle_select(m, obs, grid));
  }
}
BENCHMARK(BM_OracleGridSweep)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
