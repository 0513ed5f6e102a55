#pragma once

#include <cstdint>
#include <vector>

#include "smoothmc/matrix.hpp"
#include "smoothmc/sampling.hpp"

namespace smoothmc {

/// Output of the soft-thresholding estimator for one lambda.
struct CompletionResult {
  Matrix m_hat;
  double lambda = 0.0;
  Vector spectrum;                  // singular values of the input statistic R
  std::int64_t effective_rank = 0;  // #{j : spectrum_j > lambda*n*p/2}
};

/// Strictly increasing positive candidate penalties.
struct LambdaGrid {
  std::vector<double> values;

  void validate() const;
  static LambdaGrid logspace(double lo, double hi, int count);
  /// 30 log-spaced multiples (1e-3 to 10) of theoretical_lambda(n, p, N, 1).
  static LambdaGrid default_grid(std::int64_t n, std::int64_t p, std::int64_t num_samples);
};

/// lambda = c2 * sqrt(log(n + p) / (num_samples * min(n, p))). Natural log.
double theoretical_lambda(std::int64_t n, std::int64_t p, std::int64_t num_samples, double c2);

/// Closed-form minimizer of
///   (1/(np)) ||M||_F^2 - <(2/N) sum_t y_t X_t, M> + lambda ||M||_*,
/// namely singular-value soft-thresholding of R = (np/N) sum_t y_t X_t at
/// threshold lambda*n*p/2.
CompletionResult complete(const ObservationSet& obs, double lambda);

/// Same estimator with the SVD of R precomputed; grid sweeps reuse one
/// factorization across all lambdas.
CompletionResult complete_with_factors(const SvdFactors& r_factors, std::int64_t n,
                                       std::int64_t p, double lambda);

/// The penalized objective above at an arbitrary candidate m.
double objective_value(const ObservationSet& obs, const Matrix& m, double lambda);

/// True (1/(np))||m_hat - m||_F^2 for every grid lambda, computed from one
/// SVD of R through the spectral identity
///   ||m_hat - m||_F^2 = ||m||_F^2 + sum_j (s_j^2 - 2 s_j u_j^T m v_j),
/// where s_j are the shrunk singular values. Algebraically identical to
/// reconstructing each m_hat; costs one extra GEMM total instead of one per
/// grid point.
std::vector<double> oracle_mse_curve(const SvdFactors& r_factors, const Matrix& m_true,
                                     const LambdaGrid& grid);

struct OracleSelection {
  double lambda = 0.0;
  double mse = 0.0;
  CompletionResult result;
};

/// Sweeps the grid against the ground truth and returns the lambda with the
/// smallest true MSE (ties break toward the smaller lambda). The reported mse
/// is frobenius_mse of the reconstructed minimizer.
OracleSelection oracle_select(const Matrix& m_true, const ObservationSet& obs,
                              const LambdaGrid& grid);

}  // namespace smoothmc
