#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smoothmc/estimator.hpp"
#include "smoothmc/experiments.hpp"
#include "smoothmc/manifold.hpp"
#include "smoothmc/matrix.hpp"
#include "smoothmc/packing.hpp"
#include "smoothmc/sampling.hpp"

namespace smoothmc::io {

/// Shortest decimal that parses back to exactly the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

/// "dir/obs.csv" -> "dir/obs.meta.json".
std::string meta_path_for(const std::string& csv_path);

/// CSV "row,col,y" plus a JSON sidecar {n, p, N, mode, sigma, seed}.
/// Round-trips bitwise.
void save_observations(const ObservationSet& obs, const std::string& csv_path,
                       const std::string& meta_path);
ObservationSet load_observations(const std::string& csv_path, const std::string& meta_path);

/// Headerless CSV of entries; dimensions are implied by the layout.
void save_matrix(const Matrix& m, const std::string& csv_path);
Matrix load_matrix(const std::string& csv_path);

/// Generator parameters only ({L, K, gamma, num_basis, seed, theta_mode});
/// coefficients and latent points are reproduced from the seed, not stored.
void save_embedding_meta(const EmbeddingSpec& spec, const std::string& json_path);

/// {lambda, mse?, effective_rank, spectrum}.
void save_completion_result(const CompletionResult& result, std::optional<double> mse,
                            const std::string& json_path);

/// Header "L,n,replicate,lambda,mse", one row per replicate.
void save_rate_results_csv(const RateResult& result, const std::string& csv_path);

/// {"per_L": {"<L>": {slope, ci_lo, ci_hi, theoretical_slope}}}.
void save_rate_summary_json(const RateResult& result, const std::string& json_path);

/// Header "N,median_delta_op" plus a JSON summary with the log-log fit.
void save_delta_scaling_csv(const DeltaScalingResult& result, const std::string& csv_path);
std::string delta_scaling_summary_json(const DeltaScalingResult& result);

/// {b, count, min_separation, bound, kl_matrix, c_L, checks}.
std::string packing_certificate_json(const PackingCertificate& cert);

/// Header "epsilon,j_star".
void save_jstar_table(const std::vector<std::pair<double, std::int64_t>>& rows,
                      const std::string& csv_path);

/// Parses {sizes, L_values, K, nu, sigma, replicates, num_basis,
/// lambda_grid_spec, seed, sampling_mode}; every field is required.
/// Malformed JSON or missing fields raise std::invalid_argument.
RateExperimentConfig rate_config_from_json(const std::string& text);

void save_text(const std::string& content, const std::string& path);

}  // namespace smoothmc::io
