#include "smoothmc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "smoothmc/manifold.hpp"
#include "smoothmc/parallel.hpp"

namespace smoothmc {

namespace {

// Stream labels for per-task seed derivation.
constexpr std::uint64_t kMatrixStream = 0;
constexpr std::uint64_t kMaskStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kBootstrapStream = 0xb005;

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return (1.0 - frac) * sorted[lo] + frac * sorted[hi];
}

}  // namespace

double theoretical_slope(int L, int K) {
  if (L < 1 || K < 1) throw std::invalid_argument("theoretical_slope: L, K must be >= 1");
  return 2.0 * L / (2.0 * L + K);
}

void LambdaGridSpec::validate() const {
  if (!(min_factor > 0.0) || !(max_factor > min_factor)) {
    throw std::invalid_argument("LambdaGridSpec: need 0 < min_factor < max_factor");
  }
  if (count < 2) throw std::invalid_argument("LambdaGridSpec: count must be >= 2");
}

LambdaGrid LambdaGridSpec::build(std::int64_t n, std::int64_t p, std::int64_t num_samples) const {
  validate();
  const double pivot = theoretical_lambda(n, p, num_samples, 1.0);
  return LambdaGrid::logspace(min_factor * pivot, max_factor * pivot, count);
}

void RateExperimentConfig::validate() const {
  if (sizes.empty()) throw std::invalid_argument("RateExperimentConfig: sizes is empty");
  std::int64_t prev = 0;
  for (std::int64_t n : sizes) {
    if (n <= prev) throw std::invalid_argument("RateExperimentConfig: sizes must be strictly increasing");
    prev = n;
  }
  if (L_values.empty()) throw std::invalid_argument("RateExperimentConfig: L_values is empty");
  for (int L : L_values) {
    if (L < 1) throw std::invalid_argument("RateExperimentConfig: L values must be >= 1");
  }
  if (K < 1) throw std::invalid_argument("RateExperimentConfig: K must be >= 1");
  if (!(nu > 0.0) || !(nu < 1.0)) throw std::invalid_argument("RateExperimentConfig: nu must be in (0,1)");
  if (!(sigma >= 0.0)) throw std::invalid_argument("RateExperimentConfig: sigma must be >= 0");
  if (replicates < 1) throw std::invalid_argument("RateExperimentConfig: replicates must be >= 1");
  if (num_basis < 1) throw std::invalid_argument("RateExperimentConfig: num_basis must be >= 1");
  if (threads < 0) throw std::invalid_argument("RateExperimentConfig: threads must be >= 0");
  lambda_grid_spec.validate();
}

RateResult run_rate_experiment(const RateExperimentConfig& config) {
  config.validate();

  struct Task {
    int L;
    std::int64_t n;
    int replicate;
  };
  std::vector<Task> tasks;
  for (int L : config.L_values) {
    for (std::int64_t n : config.sizes) {
      for (int rep = 0; rep < config.replicates; ++rep) tasks.push_back({L, n, rep});
    }
  }

  RateResult out;
  out.cells.resize(tasks.size());
  const int threads = config.threads > 0 ? config.threads : default_thread_count();

  parallel_for(tasks.size(), threads, [&](std::size_t idx) {
    const Task& task = tasks[idx];
    try {
      const std::uint64_t base =
          mix_seed({config.seed, static_cast<std::uint64_t>(task.L),
                    static_cast<std::uint64_t>(task.n), static_cast<std::uint64_t>(task.replicate)});
      Rng matrix_rng(mix_seed({base, kMatrixStream}));
      Rng mask_rng(mix_seed({base, kMaskStream}));
      Rng noise_rng(mix_seed({base, kNoiseStream}));

      const std::int64_t n = task.n;
      const std::int64_t p = task.n;
      auto [m_true, spec] = generate_matrix(n, p, task.L, config.K, config.num_basis, matrix_rng);
      const auto num_samples = static_cast<std::int64_t>(
          std::llround((1.0 - config.nu) * static_cast<double>(n) * static_cast<double>(p)));
      const std::vector<MaskIndex> masks =
          sample_masks(n, p, num_samples, config.sampling_mode, mask_rng);
      const ObservationSet obs = observe(m_true, masks, config.sigma, noise_rng, config.sampling_mode);
      const LambdaGrid grid = config.lambda_grid_spec.build(n, p, num_samples);
      const OracleSelection sel = oracle_select(m_true, obs, grid);

      out.cells[idx] = RateCell{task.L, task.n, task.replicate, sel.lambda, sel.mse};
    } catch (const std::exception& e) {
      throw std::runtime_error("rate experiment replicate failed (L=" + std::to_string(task.L) +
                               ", n=" + std::to_string(task.n) +
                               ", replicate=" + std::to_string(task.replicate) +
                               ", seed=" + std::to_string(config.seed) + "): " + e.what());
    }
  });

  for (int L : config.L_values) {
    SlopeSummary summary;
    summary.theoretical_slope = theoretical_slope(L, config.K);

    std::vector<std::pair<double, std::vector<double>>> samples_by_n;
    std::vector<std::pair<double, double>> mean_points;
    for (std::int64_t n : config.sizes) {
      std::vector<double> mses;
      for (const RateCell& cell : out.cells) {
        if (cell.L == L && cell.n == n) mses.push_back(cell.mse);
      }
      double mean = 0.0;
      for (double v : mses) mean += v;
      mean /= static_cast<double>(mses.size());
      samples_by_n.emplace_back(static_cast<double>(n), std::move(mses));
      mean_points.emplace_back(static_cast<double>(n), mean);
    }

    if (config.sizes.size() >= 2) {
      const SlopeFit fit = loglog_slope(mean_points);
      summary.has_slope = true;
      summary.slope = fit.slope;
      summary.intercept = fit.intercept;
      Rng bootstrap_rng(mix_seed({config.seed, kBootstrapStream, static_cast<std::uint64_t>(L)}));
      const auto ci = bootstrap_slope_ci(samples_by_n, 1000, 0.95, bootstrap_rng);
      summary.ci_lo = ci.first;
      summary.ci_hi = ci.second;
    }
    out.per_L.emplace_back(L, summary);
  }
  return out;
}

SlopeFit loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("loglog_slope: need at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) {
      throw std::invalid_argument("loglog_slope: coordinates must be positive");
    }
    const double lx = std::log(x);
    const double ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const auto count = static_cast<double>(points.size());
  const double denom = count * sxx - sx * sx;
  if (denom <= 0.0) throw std::invalid_argument("loglog_slope: x values must be distinct");
  SlopeFit fit;
  fit.slope = (count * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / count;
  return fit;
}

std::pair<double, double> bootstrap_slope_ci(
    const std::vector<std::pair<double, std::vector<double>>>& samples_by_x, int resamples,
    double level, Rng& rng) {
  if (samples_by_x.size() < 2) throw std::invalid_argument("bootstrap_slope_ci: need >= 2 sizes");
  if (resamples < 100) throw std::invalid_argument("bootstrap_slope_ci: resamples must be >= 100");
  if (!(level > 0.0) || !(level < 1.0)) {
    throw std::invalid_argument("bootstrap_slope_ci: level must be in (0,1)");
  }
  for (const auto& [x, samples] : samples_by_x) {
    if (!(x > 0.0)) throw std::invalid_argument("bootstrap_slope_ci: sizes must be positive");
    if (samples.empty()) throw std::invalid_argument("bootstrap_slope_ci: empty replicate list");
  }

  std::vector<double> slopes;
  slopes.reserve(static_cast<std::size_t>(resamples));
  std::vector<std::pair<double, double>> points(samples_by_x.size());
  for (int it = 0; it < resamples; ++it) {
    for (std::size_t g = 0; g < samples_by_x.size(); ++g) {
      const auto& samples = samples_by_x[g].second;
      double mean = 0.0;
      for (std::size_t k = 0; k < samples.size(); ++k) {
        mean += samples[rng.next_below(samples.size())];
      }
      mean /= static_cast<double>(samples.size());
      points[g] = {samples_by_x[g].first, mean};
    }
    slopes.push_back(loglog_slope(points).slope);
  }
  std::sort(slopes.begin(), slopes.end());
  const double tail = (1.0 - level) / 2.0;
  return {quantile_sorted(slopes, tail), quantile_sorted(slopes, 1.0 - tail)};
}

DeltaScalingResult run_delta_scaling(std::int64_t n, std::int64_t p,
                                     const std::vector<std::int64_t>& sample_budgets,
                                     double sigma, int replicates, const Rng& rng) {
  if (n < 1 || p < 1) throw std::invalid_argument("run_delta_scaling: n, p must be >= 1");
  if (sample_budgets.empty()) throw std::invalid_argument("run_delta_scaling: no sample budgets");
  for (std::int64_t budget : sample_budgets) {
    if (budget < 1) throw std::invalid_argument("run_delta_scaling: budgets must be >= 1");
  }
  if (!(sigma >= 0.0)) throw std::invalid_argument("run_delta_scaling: sigma must be >= 0");
  if (replicates < 1) throw std::invalid_argument("run_delta_scaling: replicates must be >= 1");

  const Matrix zero = Matrix::Zero(n, p);
  DeltaScalingResult out;
  std::vector<std::pair<double, double>> points;
  for (std::int64_t budget : sample_budgets) {
    std::vector<double> norms;
    norms.reserve(static_cast<std::size_t>(replicates));
    for (int rep = 0; rep < replicates; ++rep) {
      const std::uint64_t base = mix_seed(
          {rng.seed(), static_cast<std::uint64_t>(budget), static_cast<std::uint64_t>(rep)});
      Rng mask_rng(mix_seed({base, kMaskStream}));
      Rng noise_rng(mix_seed({base, kNoiseStream}));
      const std::vector<MaskIndex> masks =
          sample_masks(n, p, budget, SamplingMode::with_replacement, mask_rng);
      const ObservationSet obs = observe(zero, masks, sigma, noise_rng);
      norms.push_back(sigma == 0.0 ? 0.0 : operator_norm(empirical_delta(obs, zero)));
    }
    out.rows.push_back({budget, median(norms)});
    points.emplace_back(static_cast<double>(budget), out.rows.back().median_delta_op);
  }
  if (sigma > 0.0 && sample_budgets.size() >= 2) {
    out.fit = loglog_slope(points);
  }
  return out;
}

}  // namespace smoothmc
