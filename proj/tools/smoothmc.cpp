// Command-line front end: synthetic data generation, completion, rate and
// noise-scaling experiments, packing certification, covering-number tables.
// Exit codes: 0 success, 1 runtime or verification failure, 2 invalid flags
// or config.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smoothmc/covering.hpp"
#include "smoothmc/estimator.hpp"
#include "smoothmc/experiments.hpp"
#include "smoothmc/io.hpp"
#include "smoothmc/manifold.hpp"
#include "smoothmc/packing.hpp"
#include "smoothmc/rng.hpp"
#include "smoothmc/sampling.hpp"

namespace {

using namespace smoothmc;

constexpr std::uint64_t kMatrixStream = 0;
constexpr std::uint64_t kMaskStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

struct GenerateArgs {
  std::int64_t n = 0;
  std::int64_t p = 0;
  int L = 1;
  int K = 1;
  int num_basis = 100;
  double sigma = 1.0;
  double nu = 0.3;
  std::int64_t num_samples = 0;  // 0 means derive from nu
  std::string mode = "without_replacement";
  std::string theta = "uniform";
  std::uint64_t seed = 1;
  std::string out_prefix;
};

void run_generate(const GenerateArgs& args) {
  const SamplingMode mode = sampling_mode_from_string(args.mode);
  const ThetaMode theta_mode = theta_mode_from_string(args.theta);

  Rng matrix_rng(mix_seed({args.seed, kMatrixStream}));
  Rng mask_rng(mix_seed({args.seed, kMaskStream}));
  Rng noise_rng(mix_seed({args.seed, kNoiseStream}));

  auto [m, spec] =
      generate_matrix(args.n, args.p, args.L, args.K, args.num_basis, matrix_rng, theta_mode);
  const std::int64_t num_samples =
      args.num_samples > 0
          ? args.num_samples
          : static_cast<std::int64_t>(std::llround((1.0 - args.nu) * static_cast<double>(args.n) *
                                                   static_cast<double>(args.p)));
  const std::vector<MaskIndex> masks = sample_masks(args.n, args.p, num_samples, mode, mask_rng);
  ObservationSet obs = observe(m, masks, args.sigma, noise_rng, mode);
  // The sidecar records the master seed so the whole artifact can be rebuilt
  // from this one command line.
  obs.seed = args.seed;
  spec.seed = args.seed;

  const std::string matrix_path = args.out_prefix + "_matrix.csv";
  const std::string obs_path = args.out_prefix + "_obs.csv";
  io::save_matrix(m, matrix_path);
  io::save_observations(obs, obs_path, io::meta_path_for(obs_path));
  io::save_embedding_meta(spec, args.out_prefix + "_embedding.json");

  std::cout << "generated " << args.n << "x" << args.p << " matrix (L=" << args.L
            << ", K=" << args.K << ", gamma=" << io::format_double(spec.gamma) << ")\n"
            << "observations: " << num_samples << " (" << args.mode
            << ", sigma=" << io::format_double(args.sigma) << ")\n"
            << "wrote " << matrix_path << ", " << obs_path << "\n";
}

struct CompleteArgs {
  std::string in;
  std::string meta;
  double lambda = 0.0;
  std::string out;
  std::string result_json;
  std::string truth;
};

void run_complete(const CompleteArgs& args) {
  const std::string meta = args.meta.empty() ? io::meta_path_for(args.in) : args.meta;
  const ObservationSet obs = io::load_observations(args.in, meta);
  const CompletionResult result = complete(obs, args.lambda);
  io::save_matrix(result.m_hat, args.out);

  std::optional<double> mse;
  if (!args.truth.empty()) {
    mse = frobenius_mse(result.m_hat, io::load_matrix(args.truth));
  }
  if (!args.result_json.empty()) {
    io::save_completion_result(result, mse, args.result_json);
  }
  std::cout << "lambda=" << io::format_double(result.lambda)
            << " effective_rank=" << result.effective_rank;
  if (mse) std::cout << " mse=" << io::format_double(*mse);
  std::cout << "\nwrote " << args.out << "\n";
}

struct RateArgs {
  std::string config;
  std::string out_dir;
};

void run_rate_experiment_cmd(const RateArgs& args) {
  std::ifstream in(args.config, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config: " + args.config);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const RateExperimentConfig config = io::rate_config_from_json(buffer.str());

  const RateResult result = run_rate_experiment(config);

  std::filesystem::create_directories(args.out_dir);
  const std::string results_path = args.out_dir + "/rate_results.csv";
  const std::string summary_path = args.out_dir + "/rate_summary.json";
  io::save_rate_results_csv(result, results_path);
  io::save_rate_summary_json(result, summary_path);

  for (const auto& [L, summary] : result.per_L) {
    std::cout << "L=" << L << " theoretical_slope=" << io::format_double(summary.theoretical_slope);
    if (summary.has_slope) {
      std::cout << " fitted_slope=" << io::format_double(summary.slope) << " ci=["
                << io::format_double(summary.ci_lo) << ", " << io::format_double(summary.ci_hi)
                << "]";
    }
    std::cout << "\n";
  }
  std::cout << "wrote " << results_path << ", " << summary_path << "\n";
}

struct DeltaArgs {
  std::int64_t n = 0;
  std::int64_t p = 0;
  std::vector<std::int64_t> budgets;
  double sigma = 1.0;
  int replicates = 20;
  std::uint64_t seed = 1;
  std::string out;
  std::string summary;
};

void run_delta_scaling_cmd(const DeltaArgs& args) {
  const Rng rng(args.seed);
  const DeltaScalingResult result =
      run_delta_scaling(args.n, args.p, args.budgets, args.sigma, args.replicates, rng);
  io::save_delta_scaling_csv(result, args.out);
  if (!args.summary.empty()) {
    io::save_text(io::delta_scaling_summary_json(result), args.summary);
  }
  std::cout << "fitted slope=" << io::format_double(result.fit.slope)
            << " (theory: -0.5)\nwrote " << args.out << "\n";
}

struct PackingArgs {
  std::int64_t n = 0;
  std::int64_t p = 8;
  std::int64_t b = 0;
  int count = 0;
  int L = 1;
  int K = 1;
  double gamma = 1.0;
  std::uint64_t seed = 1;
  std::int64_t kl_num_samples = 0;  // 0 means n*p
  double kl_sigma = 1.0;
  std::string out;
};

int run_verify_packing(const PackingArgs& args) {
  SmoothnessClass smoothness{args.L, args.K, args.gamma};
  Rng rng(args.seed);
  const PackingSet packing = build_packing(args.n, args.p, args.b, smoothness, args.count, rng);
  const std::int64_t kl_n =
      args.kl_num_samples > 0 ? args.kl_num_samples : args.n * args.p;
  const PackingCertificate cert = certify_packing(packing, kl_n, args.kl_sigma);

  const std::string report = io::packing_certificate_json(cert);
  std::cout << report;
  if (!args.out.empty()) io::save_text(report, args.out);

  if (!cert.all_ok()) {
    std::cerr << "verify-packing: some checks failed\n";
    return 1;
  }
  return 0;
}

struct JstarArgs {
  int L = 0;
  int K = 1;
  double gamma = 1.0;
  std::vector<double> epsilons;
  std::string out;
};

int run_jstar(const JstarArgs& args) {
  std::vector<double> epsilons = args.epsilons;
  if (epsilons.empty()) {
    for (int k = 1; k <= 8; ++k) epsilons.push_back(std::pow(0.5, k));
  }
  std::vector<std::pair<double, std::int64_t>> rows;
  std::vector<std::pair<double, double>> points;
  std::cout << "epsilon,j_star\n";
  for (double eps : epsilons) {
    const std::int64_t count = j_star_count(eps, args.L, args.K, args.gamma);
    rows.emplace_back(eps, count);
    points.emplace_back(eps, static_cast<double>(count));
    std::cout << io::format_double(eps) << "," << count << "\n";
  }
  if (!args.out.empty()) io::save_jstar_table(rows, args.out);
  if (points.size() >= 2) {
    const SlopeFit fit = loglog_slope(points);
    std::cout << "log-log slope=" << io::format_double(fit.slope) << " (theory: "
              << io::format_double(-static_cast<double>(args.K) / args.L) << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"low-rank matrix completion for smoothly embedded matrices"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "synthesize a smooth matrix and observations");
  generate->add_option("--n", gen.n, "rows")->required()->check(CLI::PositiveNumber);
  generate->add_option("--p", gen.p, "columns")->required()->check(CLI::PositiveNumber);
  generate->add_option("--L", gen.L, "smoothness order")->check(CLI::PositiveNumber);
  generate->add_option("--K", gen.K, "latent dimension")->check(CLI::PositiveNumber);
  generate->add_option("--num-basis", gen.num_basis, "basis truncation")->check(CLI::PositiveNumber);
  generate->add_option("--sigma", gen.sigma, "noise sd")->check(CLI::NonNegativeNumber);
  generate->add_option("--nu", gen.nu, "missing fraction, N = round((1-nu)*n*p)");
  generate->add_option("--num-samples", gen.num_samples, "observation count (overrides --nu)");
  generate->add_option("--mode", gen.mode, "with_replacement|without_replacement");
  generate->add_option("--theta", gen.theta, "uniform|equispaced latent points");
  generate->add_option("--seed", gen.seed, "master seed");
  generate->add_option("--out-prefix", gen.out_prefix, "output path prefix")->required();

  CompleteArgs comp;
  CLI::App* complete_cmd = app.add_subcommand("complete", "soft-threshold completion from observations");
  complete_cmd->add_option("--in", comp.in, "observations csv")->required();
  complete_cmd->add_option("--meta", comp.meta, "sidecar json (default: derived from --in)");
  complete_cmd->add_option("--lambda", comp.lambda, "penalty")->required();
  complete_cmd->add_option("--out", comp.out, "estimate csv")->required();
  complete_cmd->add_option("--result", comp.result_json, "result json path");
  complete_cmd->add_option("--truth", comp.truth, "ground-truth matrix csv (adds mse)");

  RateArgs rate;
  CLI::App* rate_cmd = app.add_subcommand("rate-experiment", "MSE decay study across sizes");
  rate_cmd->add_option("--config", rate.config, "config json")->required();
  rate_cmd->add_option("--out-dir", rate.out_dir, "output directory")->required();

  DeltaArgs delta;
  CLI::App* delta_cmd = app.add_subcommand("delta-scaling", "noise-term operator norm vs sample size");
  delta_cmd->add_option("--n", delta.n, "rows")->required()->check(CLI::PositiveNumber);
  delta_cmd->add_option("--p", delta.p, "columns")->required()->check(CLI::PositiveNumber);
  delta_cmd->add_option("--num-samples", delta.budgets, "sample budgets")->required()->expected(-1);
  delta_cmd->add_option("--sigma", delta.sigma, "noise sd")->check(CLI::NonNegativeNumber);
  delta_cmd->add_option("--replicates", delta.replicates, "replicates per budget")->check(CLI::PositiveNumber);
  delta_cmd->add_option("--seed", delta.seed, "master seed");
  delta_cmd->add_option("--out", delta.out, "csv output")->required();
  delta_cmd->add_option("--summary", delta.summary, "json summary path");

  PackingArgs pack;
  CLI::App* pack_cmd = app.add_subcommand("verify-packing", "build and certify a hypothesis packing");
  pack_cmd->add_option("--n", pack.n, "latent grid size")->required()->check(CLI::PositiveNumber);
  pack_cmd->add_option("--p", pack.p, "columns")->check(CLI::PositiveNumber);
  pack_cmd->add_option("--b", pack.b, "tessellation cells")->required()->check(CLI::PositiveNumber);
  pack_cmd->add_option("--count", pack.count, "number of hypotheses")->required()->check(CLI::PositiveNumber);
  pack_cmd->add_option("--L", pack.L, "smoothness order")->check(CLI::PositiveNumber);
  pack_cmd->add_option("--K", pack.K, "latent dimension")->check(CLI::PositiveNumber);
  pack_cmd->add_option("--gamma", pack.gamma, "derivative envelope");
  pack_cmd->add_option("--seed", pack.seed, "master seed");
  pack_cmd->add_option("--kl-num-samples", pack.kl_num_samples, "N in the KL formula (default n*p)");
  pack_cmd->add_option("--kl-sigma", pack.kl_sigma, "sigma in the KL formula");
  pack_cmd->add_option("--out", pack.out, "report json path");

  JstarArgs jstar;
  CLI::App* jstar_cmd = app.add_subcommand("jstar", "sufficient basis count for target accuracy");
  jstar_cmd->add_option("--L", jstar.L, "smoothness order")->required()->check(CLI::PositiveNumber);
  jstar_cmd->add_option("--K", jstar.K, "latent dimension")->check(CLI::PositiveNumber);
  jstar_cmd->add_option("--gamma", jstar.gamma, "derivative envelope");
  jstar_cmd->add_option("--eps", jstar.epsilons, "accuracies (default 2^-1..2^-8)")->expected(-1);
  jstar_cmd->add_option("--out", jstar.out, "csv output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (generate->parsed()) {
      run_generate(gen);
    } else if (complete_cmd->parsed()) {
      run_complete(comp);
    } else if (rate_cmd->parsed()) {
      run_rate_experiment_cmd(rate);
    } else if (delta_cmd->parsed()) {
      run_delta_scaling_cmd(delta);
    } else if (pack_cmd->parsed()) {
      return run_verify_packing(pack);
    } else if (jstar_cmd->parsed()) {
      return run_jstar(jstar);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
