#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "smoothmc/matrix.hpp"
#include "smoothmc/rng.hpp"

namespace smoothmc {

/// Derivative-bound function class: order L, envelope gamma on every partial
/// derivative up to order L, latent dimension K.
struct SmoothnessClass {
  int L = 1;
  int K = 1;
  double gamma = 1.0;

  void validate() const;
};

enum class ThetaMode { uniform, equispaced };

std::string to_string(ThetaMode mode);
ThetaMode theta_mode_from_string(const std::string& s);

/// Generator state for a matrix with entries m(i, j) = f_j(theta_i), where
/// each column function is a finite combination of tensor Fourier basis
/// functions. evaluate() on an unchanged spec is bitwise reproducible.
struct EmbeddingSpec {
  int L = 1;
  int K = 1;
  int num_basis = 100;
  double gamma = 0.0;  // tracked derivative envelope of the sampled columns
  std::uint64_t seed = 0;
  ThetaMode theta_mode = ThetaMode::uniform;
  std::vector<std::vector<int>> basis_indices;     // K-long multi-indices
  std::vector<std::vector<double>> coefficients;   // one row per column j
  Matrix theta;                                    // n x K latent points in [0,1]^K

  void validate() const;
};

/// Orthonormal Fourier basis on [0,1] by flat index: psi_1 = 1,
/// psi_{2b} = sqrt(2) cos(2 pi b x), psi_{2b+1} = sqrt(2) sin(2 pi b x).
double fourier_basis(int index, double x);

/// Flat-index multi-indices (b_1..b_K), all b_k >= 1, with product(b_k) <=
/// num_basis, enumerated lexicographically. K = 1 gives {1, ..., num_basis}.
std::vector<std::vector<int>> basis_index_set(int num_basis, int K);

/// Random coefficients beta_b ~ U[-b^-(L+1), b^-(L+1)] for b = 1..num_basis.
std::vector<double> sample_coefficients(int L, int num_basis, Rng& rng);

/// f(x) = sum_b coeffs[b-1] * psi_b(x) on [0,1].
double eval_embedded_function(const std::vector<double>& coeffs, double x);

/// Entry matrix f_j(theta_i) for the stored spec.
Matrix evaluate(const EmbeddingSpec& spec);

/// Draws latent points theta_i ~ U[0,1]^K (or places them on the equispaced
/// grid, consuming no draws) and independent per-column coefficients
/// beta ~ U[-prod(b_k)^-(L+1), prod(b_k)^-(L+1)], then evaluates. The
/// returned spec regenerates the matrix bitwise.
std::pair<Matrix, EmbeddingSpec> generate_matrix(std::int64_t n, std::int64_t p, int L, int K,
                                                 int num_basis, Rng& rng,
                                                 ThetaMode theta_mode = ThetaMode::uniform);

/// Tensor grid over (0,1]^K: theta_i = ((i_1+1)/m, ..., (i_K+1)/m) with
/// m = n^(1/K), first axis slowest. Throws unless n is a perfect K-th power.
Matrix equispaced_theta(std::int64_t n, int K);

}  // namespace smoothmc
