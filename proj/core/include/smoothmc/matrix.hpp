#pragma once

#include <Eigen/Core>

namespace smoothmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin SVD factors: A = u * singular_values.asDiagonal() * v.transpose(),
/// with min(rows, cols) columns in u and v. singular_values is sorted
/// non-increasing and non-negative.
struct SvdFactors {
  Matrix u;
  Vector singular_values;
  Matrix v;
};

/// Thin SVD of a dense real matrix. Throws std::invalid_argument on empty or
/// non-finite input and std::runtime_error if the decomposition fails.
SvdFactors svd(const Matrix& a);

/// Singular values only (cheaper than svd() when factors are not needed).
Vector singular_values(const Matrix& a);

/// Reconstructs sum_j (s_j - tau)+ u_j v_j^T from precomputed factors.
/// Requires tau >= 0.
Matrix shrink_singular_values(const SvdFactors& f, double tau);

/// Singular-value soft-thresholding: svd + shrink in one call.
Matrix soft_threshold_svd(const Matrix& a, double tau);

/// Largest singular value via power iteration on the Gram matrix, started
/// from the normalized all-ones vector. If an iterate lands in the null
/// space, restarts from unit basis vectors in index order; a zero matrix
/// returns 0. Stops when the Rayleigh estimate's relative change drops below
/// tol; throws std::runtime_error with the iteration count on
/// non-convergence.
double operator_norm(const Matrix& a, double tol = 1e-9);

/// (1 / (rows*cols)) * ||a - b||_F^2. Dimensions must agree.
double frobenius_mse(const Matrix& a, const Matrix& b);

/// Sum of singular values.
double nuclear_norm(const Matrix& a);

}  // namespace smoothmc
