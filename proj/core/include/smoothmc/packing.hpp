#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "smoothmc/bump.hpp"
#include "smoothmc/manifold.hpp"
#include "smoothmc/matrix.hpp"
#include "smoothmc/rng.hpp"

namespace smoothmc {

/// Localized cell function on [0,1]^K:
///   Phi_d(theta) = gamma * b^(-L/K) * prod_k phi(b^(1/K) theta_k - d_k + 1/2)
/// for cell index d in {1..b^(1/K)}^K. Requires b to be a perfect K-th power.
double cell_bump(const Vector& theta, const std::vector<int>& d, std::int64_t b,
                 const SmoothnessClass& smoothness, const BumpParams& bump);

/// n x b design matrix Phi(i, cell) = Phi_{d(cell)}(theta_i), cells enumerated
/// row-major over axes. Each theta row hits at most one cell (supports are
/// disjoint open boxes).
Matrix cell_bump_design(const Matrix& theta, std::int64_t b, const SmoothnessClass& smoothness,
                        const BumpParams& bump);

/// Per-cell averaged energy (1/n) sum_i Phi_d(theta_i)^2 on the equispaced
/// grid, with its certified interval
///   [gamma^2 (0.1 c_L)^(2K) b^(-(2L+K)/K), gamma^2 c_L^(2K) b^(-(2L+K)/K)].
/// Valid for 1 <= b <= 0.48^K * n (throws outside that range).
struct EnergyBounds {
  double lower = 0.0;
  double upper = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
  bool lower_ok() const { return min_value >= lower; }
  bool upper_ok() const { return max_value <= upper; }
};
EnergyBounds check_cell_energy_bounds(std::int64_t n, std::int64_t b,
                                      const SmoothnessClass& smoothness);

using CodeWord = std::vector<std::uint8_t>;

/// Random binary codes of length b*p with pairwise Hamming distance >=
/// b*p/8, found by rejection. Requires count <= 2^(b*p/8); throws
/// std::runtime_error if rejection stalls.
std::vector<CodeWord> varshamov_gilbert_codes(std::int64_t b, std::int64_t p, int count,
                                              Rng& rng);

/// Matrix for one codeword (layout w[cell*p + j]):
///   M(i, j) = sum_cell Phi_cell(theta_i) * w[cell*p + j].
/// Rank is at most b by construction.
Matrix packing_matrix(const CodeWord& code, const Matrix& theta, std::int64_t p, std::int64_t b,
                      const SmoothnessClass& smoothness, const BumpParams& bump);

/// A family of well-separated smooth hypothesis matrices on the equispaced
/// latent grid.
struct PackingSet {
  std::int64_t b = 0;
  SmoothnessClass smoothness;
  BumpParams bump;
  Matrix theta;
  std::vector<CodeWord> codes;
  std::vector<Matrix> matrices;
};

PackingSet build_packing(std::int64_t n, std::int64_t p, std::int64_t b,
                         const SmoothnessClass& smoothness, int count, Rng& rng);

/// Minimum pairwise (1/(np)) ||M_s - M_t||_F^2 over the set.
double separation_check(const PackingSet& packing);

/// Certified pairwise separation floor (gamma^2 (0.1 c_L)^(2K) / 8) * b^(-2L/K),
/// implied by the Hamming and cell-energy lower bounds.
double separation_bound(const PackingSet& packing);

/// KL divergence between the observation laws of two hypotheses under N
/// uniform samples with N(0, sigma^2) noise:
///   KL = (N / (2 sigma^2 n p)) * ||m_s - m_t||_F^2.
double kl_between_hypotheses(const Matrix& m_s, const Matrix& m_t, std::int64_t num_samples,
                             double sigma);

/// Full certification report for a packing. `checks` carries one named
/// pass/fail verdict per certified property.
struct PackingCertificate {
  std::int64_t b = 0;
  int count = 0;
  double min_separation = 0.0;
  double bound = 0.0;
  double c_L = 0.0;
  Matrix kl;  // count x count, zero diagonal
  std::vector<std::pair<std::string, bool>> checks;

  bool all_ok() const;
};

PackingCertificate certify_packing(const PackingSet& packing, std::int64_t kl_num_samples,
                                   double kl_sigma);

/// Max absolute order-L grid derivative of the columns of m, viewed as
/// functions on the equispaced K-dim grid (spacing 1/m_axis). Maximized over
/// all K-compositions of L (forward differences along each axis).
double max_grid_derivative(const Matrix& m, int L, int K);

}  // namespace smoothmc
