#include "smoothmc/estimator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace smoothmc {

void LambdaGrid::validate() const {
  if (values.empty()) throw std::invalid_argument("LambdaGrid: empty grid");
  double prev = 0.0;
  for (double v : values) {
    if (!(v > prev)) {
      throw std::invalid_argument("LambdaGrid: values must be positive and strictly increasing");
    }
    prev = v;
  }
}

LambdaGrid LambdaGrid::logspace(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw std::invalid_argument("LambdaGrid::logspace: need 0 < lo < hi");
  }
  if (count < 2) throw std::invalid_argument("LambdaGrid::logspace: count must be >= 2");
  LambdaGrid grid;
  grid.values.resize(static_cast<std::size_t>(count));
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / (count - 1);
  for (int i = 0; i < count; ++i) grid.values[static_cast<std::size_t>(i)] = std::exp(log_lo + i * step);
  grid.values.front() = lo;
  grid.values.back() = hi;
  grid.validate();
  return grid;
}

LambdaGrid LambdaGrid::default_grid(std::int64_t n, std::int64_t p, std::int64_t num_samples) {
  const double pivot = theoretical_lambda(n, p, num_samples, 1.0);
  return logspace(1e-3 * pivot, 10.0 * pivot, 30);
}

double theoretical_lambda(std::int64_t n, std::int64_t p, std::int64_t num_samples, double c2) {
  if (n < 1 || p < 1) throw std::invalid_argument("theoretical_lambda: n and p must be >= 1");
  if (num_samples < 1) throw std::invalid_argument("theoretical_lambda: num_samples must be >= 1");
  if (!(c2 > 0.0)) throw std::invalid_argument("theoretical_lambda: c2 must be positive");
  const double min_np = static_cast<double>(std::min(n, p));
  return c2 * std::sqrt(std::log(static_cast<double>(n + p)) /
                        (static_cast<double>(num_samples) * min_np));
}

CompletionResult complete_with_factors(const SvdFactors& r_factors, std::int64_t n,
                                       std::int64_t p, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("complete: lambda must be positive");
  const double tau = lambda * static_cast<double>(n) * static_cast<double>(p) / 2.0;
  CompletionResult out;
  out.lambda = lambda;
  out.spectrum = r_factors.singular_values;
  out.m_hat = shrink_singular_values(r_factors, tau);
  out.effective_rank = (r_factors.singular_values.array() > tau).count();
  return out;
}

CompletionResult complete(const ObservationSet& obs, double lambda) {
  return complete_with_factors(svd(build_R(obs)), obs.n, obs.p, lambda);
}

double objective_value(const ObservationSet& obs, const Matrix& m, double lambda) {
  obs.validate();
  if (m.rows() != obs.n || m.cols() != obs.p) {
    throw std::invalid_argument("objective_value: matrix shape does not match observations");
  }
  if (!(lambda >= 0.0)) throw std::invalid_argument("objective_value: lambda must be >= 0");
  const double cells = static_cast<double>(obs.n) * static_cast<double>(obs.p);
  double data_term = 0.0;
  for (const Observation& s : obs.samples) data_term += s.y * m(s.index.row, s.index.col);
  data_term *= 2.0 / static_cast<double>(obs.size());
  return m.squaredNorm() / cells - data_term + lambda * nuclear_norm(m);
}

std::vector<double> oracle_mse_curve(const SvdFactors& r_factors, const Matrix& m_true,
                                     const LambdaGrid& grid) {
  grid.validate();
  const Eigen::Index n = r_factors.u.rows();
  const Eigen::Index p = r_factors.v.rows();
  if (m_true.rows() != n || m_true.cols() != p) {
    throw std::invalid_argument("oracle_mse_curve: ground truth shape mismatch");
  }
  const double cells = static_cast<double>(n) * static_cast<double>(p);
  const double m_norm2 = m_true.squaredNorm();

  // q_j = u_j^T m v_j for every singular pair, via one GEMM.
  const Matrix w = m_true * r_factors.v;
  const Eigen::Index r = r_factors.singular_values.size();
  Vector q(r);
  for (Eigen::Index j = 0; j < r; ++j) q(j) = r_factors.u.col(j).dot(w.col(j));

  std::vector<double> mse;
  mse.reserve(grid.values.size());
  for (double lambda : grid.values) {
    const double tau = lambda * cells / 2.0;
    double acc = m_norm2;
    for (Eigen::Index j = 0; j < r; ++j) {
      const double s = r_factors.singular_values(j) - tau;
      if (s <= 0.0) break;  // spectrum is sorted, the rest shrink to zero
      acc += s * s - 2.0 * s * q(j);
    }
    mse.push_back(acc / cells);
  }
  return mse;
}

OracleSelection oracle_select(const Matrix& m_true, const ObservationSet& obs,
                              const LambdaGrid& grid) {
  grid.validate();
  obs.validate();
  if (m_true.rows() != obs.n || m_true.cols() != obs.p) {
    throw std::invalid_argument("oracle_select: ground truth shape mismatch");
  }
  const SvdFactors factors = svd(build_R(obs));
  const std::vector<double> curve = oracle_mse_curve(factors, m_true, grid);

  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i] < curve[best]) best = i;
  }

  OracleSelection out;
  out.lambda = grid.values[best];
  out.result = complete_with_factors(factors, obs.n, obs.p, out.lambda);
  out.mse = frobenius_mse(out.result.m_hat, m_true);
  return out;
}

}  // namespace smoothmc
