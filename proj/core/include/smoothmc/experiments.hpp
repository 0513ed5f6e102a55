#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "smoothmc/estimator.hpp"
#include "smoothmc/rng.hpp"
#include "smoothmc/sampling.hpp"

namespace smoothmc {

/// Predicted MSE decay exponent: MSE ~ n^(-2L/(2L+K)) for square matrices.
double theoretical_slope(int L, int K);

/// Grid of lambda multipliers applied to theoretical_lambda(n, p, N, 1).
struct LambdaGridSpec {
  double min_factor = 1e-3;
  double max_factor = 10.0;
  int count = 30;

  void validate() const;
  LambdaGrid build(std::int64_t n, std::int64_t p, std::int64_t num_samples) const;
};

struct RateExperimentConfig {
  std::vector<std::int64_t> sizes;  // square sizes n = p, strictly increasing
  std::vector<int> L_values;
  int K = 1;
  double nu = 0.3;     // missingness: N = round((1 - nu) * n * p)
  double sigma = 1.0;
  int replicates = 20;
  int num_basis = 100;
  LambdaGridSpec lambda_grid_spec;
  std::uint64_t seed = 0;
  SamplingMode sampling_mode = SamplingMode::without_replacement;
  int threads = 0;  // 0 means default_thread_count()

  void validate() const;
};

struct RateCell {
  int L = 0;
  std::int64_t n = 0;
  int replicate = 0;
  double lambda = 0.0;
  double mse = 0.0;
};

struct SlopeSummary {
  bool has_slope = false;  // needs at least two sizes
  double slope = 0.0;
  double intercept = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double theoretical_slope = 0.0;
};

struct RateResult {
  std::vector<RateCell> cells;  // ordered by (L, n, replicate)
  std::vector<std::pair<int, SlopeSummary>> per_L;
};

/// Full synthetic rate study: per (L, n, replicate) generate a smooth matrix,
/// observe it, pick the oracle lambda on the grid, record the true MSE; then
/// per L regress log mean-MSE on log n and bootstrap a 95% CI for the slope.
/// Replicates use derived seeds keyed by (seed, L, n, replicate), so results
/// are identical for any thread count.
RateResult run_rate_experiment(const RateExperimentConfig& config);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// OLS fit of log(y) on log(x). Requires >= 2 distinct x and positive x, y.
SlopeFit loglog_slope(const std::vector<std::pair<double, double>>& points);

/// Percentile bootstrap CI for the log-log slope: replicates are resampled
/// with replacement within each size, means refit, quantiles taken over the
/// resampled slopes (linear interpolation between order statistics).
std::pair<double, double> bootstrap_slope_ci(
    const std::vector<std::pair<double, std::vector<double>>>& samples_by_x, int resamples,
    double level, Rng& rng);

struct DeltaScalingRow {
  std::int64_t num_samples = 0;
  double median_delta_op = 0.0;
};

struct DeltaScalingResult {
  std::vector<DeltaScalingRow> rows;
  SlopeFit fit;  // log median ||Delta||_op on log N
};

/// Operator-norm scaling of the pure-noise first-moment deviation: the signal
/// is the zero matrix, observations are sigma * xi at uniformly resampled
/// cells, and the median ||Delta||_op per sample budget is fit on a log-log
/// scale (theory predicts slope -1/2).
DeltaScalingResult run_delta_scaling(std::int64_t n, std::int64_t p,
                                     const std::vector<std::int64_t>& sample_budgets,
                                     double sigma, int replicates, const Rng& rng);

}  // namespace smoothmc
