#include "smoothmc/matrix.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>
#include <string>

namespace smoothmc {

namespace {

void require_dense(const Matrix& a, const char* op) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw std::invalid_argument(std::string(op) + ": matrix must be non-empty");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument(std::string(op) + ": matrix contains NaN or Inf");
  }
}

}  // namespace

SvdFactors svd(const Matrix& a) {
  require_dense(a, "svd");
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw std::runtime_error("svd: decomposition failed (status " +
                             std::to_string(static_cast<int>(dec.info())) + ")");
  }
  return SvdFactors{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

Vector singular_values(const Matrix& a) {
  require_dense(a, "singular_values");
  Eigen::BDCSVD<Matrix> dec(a);
  if (dec.info() != Eigen::Success) {
    throw std::runtime_error("singular_values: decomposition failed (status " +
                             std::to_string(static_cast<int>(dec.info())) + ")");
  }
  return dec.singularValues();
}

Matrix shrink_singular_values(const SvdFactors& f, double tau) {
  if (!(tau >= 0.0)) {
    throw std::invalid_argument("shrink_singular_values: tau must be >= 0");
  }
  const Eigen::Index r = f.singular_values.size();
  Eigen::Index kept = 0;
  while (kept < r && f.singular_values(kept) > tau) ++kept;
  if (kept == 0) return Matrix::Zero(f.u.rows(), f.v.rows());
  const Vector shrunk = f.singular_values.head(kept).array() - tau;
  return f.u.leftCols(kept) * shrunk.asDiagonal() * f.v.leftCols(kept).transpose();
}

Matrix soft_threshold_svd(const Matrix& a, double tau) {
  return shrink_singular_values(svd(a), tau);
}

double operator_norm(const Matrix& a, double tol) {
  require_dense(a, "operator_norm");
  if (!(tol > 0.0)) throw std::invalid_argument("operator_norm: tol must be positive");

  // Iterate on the smaller side so the Gram product is as cheap as possible.
  const bool wide = a.rows() <= a.cols();
  const Eigen::Index m = wide ? a.rows() : a.cols();
  const auto gram_apply = [&](const Vector& v) -> Vector {
    if (wide) return a * (a.transpose() * v);
    return a.transpose() * (a * v);
  };

  Vector v = Vector::Ones(m) / std::sqrt(static_cast<double>(m));
  Vector w = gram_apply(v);
  Eigen::Index restart = 0;
  while (w.norm() == 0.0) {
    // v is in the null space of the Gram matrix; restart from basis vectors.
    if (restart == m) return 0.0;
    v = Vector::Unit(m, restart++);
    w = gram_apply(v);
  }

  const int max_iterations = 100000;
  double sigma = -1.0;
  int stable = 0;
  for (int it = 1; it <= max_iterations; ++it) {
    const double w_norm = w.norm();
    if (w_norm == 0.0) return 0.0;
    const double rayleigh = v.dot(w);
    const double sigma_new = std::sqrt(std::max(rayleigh, 0.0));
    if (sigma >= 0.0 && std::abs(sigma_new - sigma) <= tol * std::max(sigma_new, 1e-300)) {
      if (++stable >= 2) return sigma_new;
    } else {
      stable = 0;
    }
    sigma = sigma_new;
    v = w / w_norm;
    w = gram_apply(v);
  }
  throw std::runtime_error("operator_norm: power iteration did not converge in " +
                           std::to_string(max_iterations) + " iterations");
}

double frobenius_mse(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("frobenius_mse: dimension mismatch");
  }
  if (a.size() == 0) throw std::invalid_argument("frobenius_mse: matrices must be non-empty");
  const double cells = static_cast<double>(a.rows()) * static_cast<double>(a.cols());
  return (a - b).squaredNorm() / cells;
}

double nuclear_norm(const Matrix& a) {
  return singular_values(a).sum();
}

}  // namespace smoothmc
