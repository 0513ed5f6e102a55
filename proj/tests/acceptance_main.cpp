// Acceptance gate: one self-contained check per release criterion, each
// reported as a single [PASS]/[FAIL] line with the measured values. Exit code
// 0 iff every criterion passes. Tolerances are pinned here, next to the
// checks they govern.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "smoothmc/covering.hpp"
#include "smoothmc/estimator.hpp"
#include "smoothmc/experiments.hpp"
#include "smoothmc/io.hpp"
#include "smoothmc/manifold.hpp"
#include "smoothmc/matrix.hpp"
#include "smoothmc/packing.hpp"
#include "smoothmc/rng.hpp"
#include "smoothmc/sampling.hpp"

#ifndef SMOOTHMC_CLI_PATH
#error "SMOOTHMC_CLI_PATH must point at the command-line binary"
#endif

namespace {

using namespace smoothmc;
namespace fs = std::filesystem;

constexpr std::uint64_t kSeed = 20240901;

// Criterion 1: fitted |slope| within this of 2L/(2L+K).
constexpr double kSlopeTolerance = 0.15;
// Criterion 3: objective slack for competing candidates.
constexpr double kOptimalitySlack = 1e-10;
constexpr int kOptimalityInstances = 200;
constexpr int kPerturbationsPerInstance = 100;
constexpr int kCandidatesPerInstance = 10000;
// Criterion 4: cellwise mean within this many MC standard errors...
constexpr double kUnbiasedSeMultiple = 4.0;
// ...on at least this fraction of cells.
constexpr double kUnbiasedCellFraction = 0.95;
constexpr int kUnbiasedReplicates = 10000;
// Criterion 5: log-log slope of median ||Delta||_op vs N.
constexpr double kDeltaTheorySlope = -0.5;
constexpr double kDeltaSlopeTolerance = 0.1;
// Criterion 6: basis-count power law slope tolerance around K/L.
constexpr double kJstarSlopeTolerance = 0.05;
// Criterion 7: KL identity vs Monte-Carlo likelihood ratio, and a time box.
constexpr double kKlSeMultiple = 3.0;
constexpr int kKlMonteCarloSamples = 100000;
constexpr double kPackingTimeLimitSeconds = 60.0;

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

void report(int criterion, const std::string& name, const Outcome& outcome) {
  std::cout << (outcome.ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << name
            << " — " << outcome.detail << std::endl;
}

// ---------------------------------------------------------------- 1 and 2 --

RateResult run_reference_rate_study() {
  RateExperimentConfig config;
  config.sizes = {200, 400, 800, 1600};
  config.L_values = {1, 3, 5};
  config.K = 1;
  config.nu = 0.3;
  config.sigma = 1.0;
  config.replicates = 20;
  config.num_basis = 100;
  config.seed = kSeed;
  config.sampling_mode = SamplingMode::without_replacement;
  return run_rate_experiment(config);
}

Outcome check_slope_recovery(const RateResult& result) {
  Outcome outcome;
  outcome.ok = true;
  std::ostringstream detail;
  for (std::size_t i = 0; i < result.per_L.size(); ++i) {
    const auto& [L, summary] = result.per_L[i];
    const double fitted = std::abs(summary.slope);
    const double target = summary.theoretical_slope;
    const bool within = summary.has_slope && std::abs(fitted - target) <= kSlopeTolerance;
    outcome.ok = outcome.ok && within;
    if (i > 0) detail << ", ";
    detail << "L=" << L << " |slope|=" << fmt(fitted) << " vs " << fmt(target)
           << (within ? "" : " OUT OF TOLERANCE");
  }
  detail << " (tolerance " << kSlopeTolerance << ")";
  outcome.detail = detail.str();
  return outcome;
}

Outcome check_slope_ordering(const RateResult& result) {
  const SlopeSummary* low = nullptr;
  const SlopeSummary* high = nullptr;
  for (const auto& [L, summary] : result.per_L) {
    if (L == 1) low = &summary;
    if (L == 5) high = &summary;
  }
  Outcome outcome;
  if (low == nullptr || high == nullptr) {
    outcome.detail = "run is missing L=1 or L=5";
    return outcome;
  }
  const bool steeper = std::abs(high->slope) > std::abs(low->slope);
  const bool disjoint = high->ci_hi < low->ci_lo || high->ci_lo > low->ci_hi;
  outcome.ok = steeper && disjoint;
  std::ostringstream detail;
  detail << "|slope(L=5)|=" << fmt(std::abs(high->slope)) << " vs |slope(L=1)|="
         << fmt(std::abs(low->slope)) << "; CIs [" << fmt(high->ci_lo) << ", "
         << fmt(high->ci_hi) << "] and [" << fmt(low->ci_lo) << ", " << fmt(low->ci_hi) << "] "
         << (disjoint ? "disjoint" : "OVERLAP");
  outcome.detail = detail.str();
  return outcome;
}

// --------------------------------------------------------------------- 3 --

Outcome check_estimator_optimality() {
  Rng master(mix_seed({kSeed, 3}));
  std::int64_t losses = 0;
  double worst_margin = 0.0;  // most negative (candidate - solution) objective gap
  for (int instance = 0; instance < kOptimalityInstances; ++instance) {
    Rng rng = master.derive(static_cast<std::uint64_t>(instance));
    const auto n = static_cast<std::int64_t>(5 + rng.next_below(36));
    const auto p = static_cast<std::int64_t>(5 + rng.next_below(36));
    const int L = 1 + static_cast<int>(rng.next_below(3));
    auto [m_true, spec] = generate_matrix(n, p, L, 1, 8, rng);
    (void)spec;
    const auto budget = static_cast<std::int64_t>(n * p);
    const auto masks = sample_masks(n, p, budget, SamplingMode::with_replacement, rng);
    const ObservationSet obs = observe(m_true, masks, 0.5, rng);
    // Random grid multiple keeps the threshold regime varied across instances.
    const double lambda =
        theoretical_lambda(n, p, budget, 1.0) * std::pow(10.0, 2.0 * rng.next_uniform() - 1.0);

    const CompletionResult solution = complete(obs, lambda);
    const double base = objective_value(obs, solution.m_hat, lambda);
    const double scale = 1.0 + solution.m_hat.norm();

    Matrix direction(n, p);
    for (int trial = 0; trial < kPerturbationsPerInstance; ++trial) {
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) direction(i, j) = rng.next_gaussian();
      }
      const double radius = scale * std::pow(10.0, -3.0 * rng.next_uniform());
      const Matrix candidate = solution.m_hat + (radius / direction.norm()) * direction;
      const double gap = objective_value(obs, candidate, lambda) - base;
      worst_margin = std::min(worst_margin, gap);
      if (gap < -kOptimalitySlack) ++losses;
    }
    for (int trial = 0; trial < kCandidatesPerInstance; ++trial) {
      const double sd = scale * std::pow(10.0, 2.0 * rng.next_uniform() - 2.0) /
                        std::sqrt(static_cast<double>(n * p));
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) direction(i, j) = sd * rng.next_gaussian();
      }
      const double gap = objective_value(obs, direction, lambda) - base;
      worst_margin = std::min(worst_margin, gap);
      if (gap < -kOptimalitySlack) ++losses;
    }
  }
  Outcome outcome;
  outcome.ok = losses == 0;
  std::ostringstream detail;
  detail << kOptimalityInstances << " instances x "
         << (kPerturbationsPerInstance + kCandidatesPerInstance)
         << " candidates, objective losses=" << losses << ", worst margin=" << fmt(worst_margin)
         << " (slack " << kOptimalitySlack << ")";
  outcome.detail = detail.str();
  return outcome;
}

// --------------------------------------------------------------------- 4 --

Outcome check_unbiasedness() {
  const std::int64_t n = 10, p = 10, budget = 70;
  Rng rng(mix_seed({kSeed, 4}));
  auto [m_true, spec] = generate_matrix(n, p, 1, 1, 20, rng);
  (void)spec;

  Matrix mean = Matrix::Zero(n, p);
  Matrix mean_sq = Matrix::Zero(n, p);
  for (int rep = 0; rep < kUnbiasedReplicates; ++rep) {
    const auto masks = sample_masks(n, p, budget, SamplingMode::with_replacement, rng);
    const Matrix r = build_R(observe(m_true, masks, 1.0, rng));
    mean += r;
    mean_sq += r.cwiseProduct(r);
  }
  mean /= static_cast<double>(kUnbiasedReplicates);
  mean_sq /= static_cast<double>(kUnbiasedReplicates);

  std::int64_t within = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double var = std::max(mean_sq(i, j) - mean(i, j) * mean(i, j), 0.0);
      const double se = std::sqrt(var / static_cast<double>(kUnbiasedReplicates));
      if (std::abs(mean(i, j) - m_true(i, j)) <= kUnbiasedSeMultiple * se) ++within;
    }
  }
  const double fraction = static_cast<double>(within) / static_cast<double>(n * p);
  Outcome outcome;
  outcome.ok = fraction >= kUnbiasedCellFraction;
  std::ostringstream detail;
  detail << within << "/" << n * p << " cells within " << kUnbiasedSeMultiple
         << " standard errors over " << kUnbiasedReplicates << " replicates (need >= "
         << fmt(100.0 * kUnbiasedCellFraction) << "%)";
  outcome.detail = detail.str();
  return outcome;
}

// --------------------------------------------------------------------- 5 --

Outcome check_delta_scaling() {
  const std::vector<std::int64_t> budgets = {400, 800, 1600, 3200, 6400};
  const DeltaScalingResult result = run_delta_scaling(50, 50, budgets, 1.0, 50, Rng(kSeed));
  Outcome outcome;
  outcome.ok = std::abs(result.fit.slope - kDeltaTheorySlope) <= kDeltaSlopeTolerance;
  std::ostringstream detail;
  detail << "fitted slope " << fmt(result.fit.slope) << " vs " << kDeltaTheorySlope
         << " (tolerance " << kDeltaSlopeTolerance << ", n=p=50, 50 replicates)";
  outcome.detail = detail.str();
  return outcome;
}

// --------------------------------------------------------------------- 6 --

Outcome check_jstar_power_law() {
  const std::vector<std::pair<int, int>> pairs = {{1, 1}, {1, 2}, {2, 1}};  // (K, L)
  Outcome outcome;
  outcome.ok = true;
  std::ostringstream detail;
  for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
    const auto [K, L] = pairs[idx];
    std::vector<std::pair<double, double>> points;
    for (int k = 1; k <= 8; ++k) {
      const double eps = std::pow(2.0, -k);
      points.emplace_back(1.0 / eps,
                          static_cast<double>(j_star_count(eps, L, K, 1.0)));
    }
    const double slope = loglog_slope(points).slope;
    const double target = static_cast<double>(K) / L;
    const bool within = std::abs(slope - target) <= kJstarSlopeTolerance;
    outcome.ok = outcome.ok && within;
    if (idx > 0) detail << ", ";
    detail << "(K=" << K << ",L=" << L << ") slope " << fmt(slope) << " vs " << fmt(target)
           << (within ? "" : " OUT OF TOLERANCE");
  }
  detail << " (tolerance " << kJstarSlopeTolerance << ")";
  outcome.detail = detail.str();
  return outcome;
}

// --------------------------------------------------------------------- 7 --

Outcome check_packing_certificate() {
  const auto start = std::chrono::steady_clock::now();
  const std::int64_t n = 64, p = 8, b = 4;
  const std::int64_t kl_samples = n * p;
  const double sigma = 1.0;

  Rng rng(mix_seed({kSeed, 7}));
  const PackingSet packing = build_packing(n, p, b, SmoothnessClass{1, 1, 1.0}, 4, rng);
  const PackingCertificate cert = certify_packing(packing, kl_samples, sigma);

  std::vector<std::string> failed;
  for (const auto& [name, ok] : cert.checks) {
    if (!ok) failed.push_back(name);
  }

  // Monte-Carlo likelihood-ratio estimate of each pairwise KL: draw a uniform
  // cell and a noisy observation under hypothesis s, average the per-draw
  // log-likelihood ratio against hypothesis t, and scale by the sample budget.
  double max_deviation_se = 0.0;
  for (std::size_t s = 0; s < packing.matrices.size(); ++s) {
    for (std::size_t t = s + 1; t < packing.matrices.size(); ++t) {
      Rng mc(mix_seed({kSeed, 7, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(t)}));
      const Matrix& ms = packing.matrices[s];
      const Matrix& mt = packing.matrices[t];
      double sum = 0.0, sum_sq = 0.0;
      for (int draw = 0; draw < kKlMonteCarloSamples; ++draw) {
        const auto cell = static_cast<std::int64_t>(mc.next_below(static_cast<std::uint64_t>(n * p)));
        const auto i = static_cast<Eigen::Index>(cell / p);
        const auto j = static_cast<Eigen::Index>(cell % p);
        const double y = ms(i, j) + sigma * mc.next_gaussian();
        const double rs = y - ms(i, j);
        const double rt = y - mt(i, j);
        const double llr = (rt * rt - rs * rs) / (2.0 * sigma * sigma);
        sum += llr;
        sum_sq += llr * llr;
      }
      const double mc_mean = sum / kKlMonteCarloSamples;
      const double mc_var =
          std::max(sum_sq / kKlMonteCarloSamples - mc_mean * mc_mean, 0.0);
      const double kl_mc = static_cast<double>(kl_samples) * mc_mean;
      const double se = static_cast<double>(kl_samples) *
                        std::sqrt(mc_var / kKlMonteCarloSamples);
      const double deviation = std::abs(cert.kl(static_cast<Eigen::Index>(s),
                                                static_cast<Eigen::Index>(t)) - kl_mc);
      if (se == 0.0) {
        if (deviation > 0.0) failed.push_back("kl_monte_carlo");
        continue;
      }
      max_deviation_se = std::max(max_deviation_se, deviation / se);
      if (deviation > kKlSeMultiple * se) failed.push_back("kl_monte_carlo");
    }
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (elapsed > kPackingTimeLimitSeconds) failed.push_back("time_limit");

  Outcome outcome;
  outcome.ok = failed.empty();
  std::ostringstream detail;
  detail << "separation " << fmt(cert.min_separation) << " >= bound " << fmt(cert.bound)
         << ", max KL deviation " << fmt(max_deviation_se) << " SE (limit " << kKlSeMultiple
         << "), " << fmt(elapsed) << "s";
  if (!failed.empty()) {
    detail << "; failed:";
    for (const auto& name : failed) detail << " " << name;
  }
  outcome.detail = detail.str();
  return outcome;
}

// --------------------------------------------------------------------- 8 --

struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("smoothmc_acceptance_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing:" + path + ">";
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Runs the CLI with `cwd` as working directory so jobs can name their outputs
// with relative paths; stdout then carries no run-specific directory names and
// the byte-identity comparison below stays exact.
int run_cli(const std::string& args, const std::string& stdout_path, int threads,
            const std::string& cwd) {
  std::string command = "cd '" + cwd + "' && env";
  command += " SMOOTHMC_THREADS=" + std::to_string(threads);
  command += " " + std::string(SMOOTHMC_CLI_PATH) + " " + args + " > " + stdout_path + " 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome check_cli_determinism() {
  ScratchDir inputs("inputs");

  // Stage shared inputs once (any thread count; determinism is what's tested).
  const std::string staging_log = inputs.file("staging.log");
  if (run_cli("generate --n 16 --p 12 --L 2 --num-basis 10 --sigma 1 --seed 4242 "
              "--out-prefix " + inputs.file("in"), staging_log, 1,
              inputs.path.string()) != 0) {
    return {false, "staging generate failed: " + slurp(staging_log)};
  }
  const std::string config_path = inputs.file("rate_config.json");
  io::save_text(R"({
  "sizes": [12, 24],
  "L_values": [1],
  "K": 1,
  "nu": 0.3,
  "sigma": 0.3,
  "replicates": 3,
  "num_basis": 8,
  "lambda_grid_spec": {"min_factor": 1e-3, "max_factor": 10.0, "count": 30},
  "seed": 99,
  "sampling_mode": "without_replacement"
})", config_path);

  // Each entry: subcommand name, argument line, produced artifacts. Output
  // paths are relative; every run executes inside its own scratch directory.
  struct Job {
    std::string name;
    std::string args;
    std::vector<std::string> artifacts;
  };
  const std::vector<Job> jobs = {
      {"generate",
       "generate --n 16 --p 12 --L 2 --num-basis 10 --sigma 1 --seed 4242 --out-prefix g",
       {"g_matrix.csv", "g_obs.csv", "g_obs.meta.json", "g_embedding.json"}},
      {"complete",
       "complete --in " + inputs.file("in_obs.csv") + " --lambda 0.05 --out m_hat.csv "
       "--result result.json --truth " + inputs.file("in_matrix.csv"),
       {"m_hat.csv", "result.json"}},
      {"rate-experiment",
       "rate-experiment --config " + config_path + " --out-dir .",
       {"rate_results.csv", "rate_summary.json"}},
      {"delta-scaling",
       "delta-scaling --n 16 --p 16 --num-samples 64 256 1024 --sigma 1 --replicates 5 "
       "--seed 7 --out delta.csv --summary delta.json",
       {"delta.csv", "delta.json"}},
      {"verify-packing",
       "verify-packing --n 64 --p 8 --b 4 --count 4 --seed 21 --out packing.json",
       {"packing.json"}},
      {"jstar", "jstar --L 1 --K 1 --eps 0.5 0.25 0.125 0.0625 --out jstar.csv",
       {"jstar.csv"}},
  };
  const std::vector<int> thread_counts = {1, 4, 8};
  const int runs_per_setting = 2;

  Outcome outcome;
  outcome.ok = true;
  std::ostringstream detail;
  for (const Job& job : jobs) {
    std::vector<std::string> blobs;
    for (int threads : thread_counts) {
      for (int run = 0; run < runs_per_setting; ++run) {
        ScratchDir dir(job.name + "_t" + std::to_string(threads) + "_r" + std::to_string(run));
        const std::string stdout_path = dir.file("stdout.capture");
        const int code = run_cli(job.args, stdout_path, threads, dir.path.string());
        if (code != 0) {
          outcome.ok = false;
          detail << job.name << " exited " << code << " under " << threads << " threads; ";
          continue;
        }
        std::string blob = slurp(stdout_path);
        for (const std::string& artifact : job.artifacts) {
          blob += "\n--- " + artifact + " ---\n" + slurp(dir.file(artifact));
        }
        blobs.push_back(std::move(blob));
      }
    }
    const bool identical =
        blobs.size() == thread_counts.size() * runs_per_setting &&
        std::all_of(blobs.begin(), blobs.end(),
                    [&](const std::string& blob) { return blob == blobs.front(); });
    if (!identical) {
      outcome.ok = false;
      detail << job.name << " outputs differ across runs/threads; ";
    }
  }
  if (outcome.ok) {
    detail << jobs.size() << " subcommands x {1,4,8} threads x " << runs_per_setting
           << " runs byte-identical";
  }
  outcome.detail = detail.str();
  return outcome;
}

}  // namespace

int main() {
  std::cout << "acceptance suite (seed " << kSeed << ")" << std::endl;

  const RateResult rate = run_reference_rate_study();
  const Outcome c1 = check_slope_recovery(rate);
  report(1, "slope recovery across smoothness orders", c1);
  const Outcome c2 = check_slope_ordering(rate);
  report(2, "smoother classes decay faster (disjoint CIs)", c2);
  const Outcome c3 = check_estimator_optimality();
  report(3, "closed form minimizes the penalized objective", c3);
  const Outcome c4 = check_unbiasedness();
  report(4, "sampling statistic is cellwise unbiased", c4);
  const Outcome c5 = check_delta_scaling();
  report(5, "noise deviation operator norm scales as N^-1/2", c5);
  const Outcome c6 = check_jstar_power_law();
  report(6, "sufficient basis count follows the eps^-K/L law", c6);
  const Outcome c7 = check_packing_certificate();
  report(7, "hypothesis packing certificate", c7);
  const Outcome c8 = check_cli_determinism();
  report(8, "CLI byte-determinism across thread counts", c8);

  const int passed = c1.ok + c2.ok + c3.ok + c4.ok + c5.ok + c6.ok + c7.ok + c8.ok;
  std::cout << "acceptance: " << passed << "/8 criteria passed" << std::endl;
  return passed == 8 ? 0 : 1;
}
