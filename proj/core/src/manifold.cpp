#include "smoothmc/manifold.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace smoothmc {

namespace {

// Frequency and amplitude of the flat-index basis function: psi_1 is the
// constant, even indices are cosines, odd indices sines.
int basis_frequency(int index) { return index == 1 ? 0 : index / 2; }
double basis_amplitude(int index) { return index == 1 ? 1.0 : std::numbers::sqrt2; }

void append_indices(int num_basis, int K, int depth, int product, std::vector<int>& current,
                    std::vector<std::vector<int>>& out) {
  if (depth == K) {
    out.push_back(current);
    return;
  }
  for (int b = 1; product * b <= num_basis; ++b) {
    current.push_back(b);
    append_indices(num_basis, K, depth + 1, product * b, current, out);
    current.pop_back();
  }
}

}  // namespace

void SmoothnessClass::validate() const {
  if (L < 1) throw std::invalid_argument("SmoothnessClass: L must be >= 1");
  if (K < 1) throw std::invalid_argument("SmoothnessClass: K must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("SmoothnessClass: gamma must be positive");
}

std::string to_string(ThetaMode mode) {
  switch (mode) {
    case ThetaMode::uniform: return "uniform";
    case ThetaMode::equispaced: return "equispaced";
  }
  throw std::invalid_argument("to_string: unknown ThetaMode");
}

ThetaMode theta_mode_from_string(const std::string& s) {
  if (s == "uniform") return ThetaMode::uniform;
  if (s == "equispaced") return ThetaMode::equispaced;
  throw std::invalid_argument("unknown theta mode: " + s);
}

void EmbeddingSpec::validate() const {
  if (L < 1 || K < 1 || num_basis < 1) {
    throw std::invalid_argument("EmbeddingSpec: L, K, num_basis must be >= 1");
  }
  if (theta.rows() < 1 || theta.cols() != K) {
    throw std::invalid_argument("EmbeddingSpec: theta must be n x K with n >= 1");
  }
  if ((theta.array() < 0.0).any() || (theta.array() > 1.0).any()) {
    throw std::invalid_argument("EmbeddingSpec: theta entries must lie in [0,1]");
  }
  if (basis_indices.empty()) throw std::invalid_argument("EmbeddingSpec: empty basis index set");
  for (const auto& multi : basis_indices) {
    if (static_cast<int>(multi.size()) != K) {
      throw std::invalid_argument("EmbeddingSpec: basis index arity must equal K");
    }
    long long product = 1;
    for (int b : multi) {
      if (b < 1) throw std::invalid_argument("EmbeddingSpec: basis indices must be >= 1");
      product *= b;
    }
    if (product > num_basis) {
      throw std::invalid_argument("EmbeddingSpec: basis index product exceeds num_basis");
    }
  }
  if (coefficients.empty()) throw std::invalid_argument("EmbeddingSpec: no columns");
  for (const auto& row : coefficients) {
    if (row.size() != basis_indices.size()) {
      throw std::invalid_argument("EmbeddingSpec: coefficient row length mismatch");
    }
  }
}

double fourier_basis(int index, double x) {
  if (index < 1) throw std::invalid_argument("fourier_basis: index must be >= 1");
  if (index == 1) return 1.0;
  const double arg = 2.0 * std::numbers::pi * basis_frequency(index) * x;
  return index % 2 == 0 ? std::numbers::sqrt2 * std::cos(arg)
                        : std::numbers::sqrt2 * std::sin(arg);
}

std::vector<std::vector<int>> basis_index_set(int num_basis, int K) {
  if (num_basis < 1 || K < 1) {
    throw std::invalid_argument("basis_index_set: num_basis and K must be >= 1");
  }
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  append_indices(num_basis, K, 0, 1, current, out);
  return out;
}

std::vector<double> sample_coefficients(int L, int num_basis, Rng& rng) {
  if (L < 1 || num_basis < 1) {
    throw std::invalid_argument("sample_coefficients: L and num_basis must be >= 1");
  }
  std::vector<double> coeffs(static_cast<std::size_t>(num_basis));
  for (int b = 1; b <= num_basis; ++b) {
    const double bound = std::pow(static_cast<double>(b), -(L + 1.0));
    coeffs[b - 1] = (2.0 * rng.next_uniform() - 1.0) * bound;
  }
  return coeffs;
}

double eval_embedded_function(const std::vector<double>& coeffs, double x) {
  if (coeffs.empty()) throw std::invalid_argument("eval_embedded_function: empty coefficients");
  double sum = 0.0;
  for (std::size_t b = 0; b < coeffs.size(); ++b) {
    sum += coeffs[b] * fourier_basis(static_cast<int>(b) + 1, x);
  }
  return sum;
}

Matrix evaluate(const EmbeddingSpec& spec) {
  spec.validate();
  const Eigen::Index n = spec.theta.rows();
  const Eigen::Index terms = static_cast<Eigen::Index>(spec.basis_indices.size());
  const Eigen::Index p = static_cast<Eigen::Index>(spec.coefficients.size());

  Matrix psi(n, terms);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t < terms; ++t) {
      double value = 1.0;
      for (int k = 0; k < spec.K; ++k) {
        value *= fourier_basis(spec.basis_indices[t][k], spec.theta(i, k));
      }
      psi(i, t) = value;
    }
  }

  Matrix coeffs(p, terms);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index t = 0; t < terms; ++t) coeffs(j, t) = spec.coefficients[j][t];
  }
  return psi * coeffs.transpose();
}

std::pair<Matrix, EmbeddingSpec> generate_matrix(std::int64_t n, std::int64_t p, int L, int K,
                                                 int num_basis, Rng& rng, ThetaMode theta_mode) {
  if (n < 1 || p < 1) throw std::invalid_argument("generate_matrix: n and p must be >= 1");
  if (L < 1 || K < 1 || num_basis < 1) {
    throw std::invalid_argument("generate_matrix: L, K, num_basis must be >= 1");
  }

  EmbeddingSpec spec;
  spec.L = L;
  spec.K = K;
  spec.num_basis = num_basis;
  spec.seed = rng.seed();
  spec.theta_mode = theta_mode;
  spec.basis_indices = basis_index_set(num_basis, K);

  if (theta_mode == ThetaMode::equispaced) {
    spec.theta = equispaced_theta(n, K);
  } else {
    spec.theta.resize(n, K);
    for (std::int64_t i = 0; i < n; ++i) {
      for (int k = 0; k < K; ++k) spec.theta(i, k) = rng.next_uniform();
    }
  }

  const std::size_t terms = spec.basis_indices.size();
  spec.coefficients.assign(static_cast<std::size_t>(p), std::vector<double>(terms, 0.0));
  double sup_flat = 0.0;   // envelope for derivative order 0
  double sup_deriv = 0.0;  // envelope for derivative order L
  for (std::int64_t j = 0; j < p; ++j) {
    double col_flat = 0.0;
    double col_deriv = 0.0;
    for (std::size_t t = 0; t < terms; ++t) {
      long long product = 1;
      double amplitude = 1.0;
      int max_freq = 0;
      for (int k = 0; k < K; ++k) {
        const int b = spec.basis_indices[t][k];
        product *= b;
        amplitude *= basis_amplitude(b);
        max_freq = std::max(max_freq, basis_frequency(b));
      }
      const double bound = std::pow(static_cast<double>(product), -(L + 1.0));
      const double beta = (2.0 * rng.next_uniform() - 1.0) * bound;
      spec.coefficients[static_cast<std::size_t>(j)][t] = beta;
      col_flat += std::abs(beta) * amplitude;
      if (max_freq > 0) {
        // Worst mixed partial of order L concentrates on the fastest axis.
        col_deriv += std::abs(beta) * amplitude *
                     std::pow(2.0 * std::numbers::pi * max_freq, static_cast<double>(L));
      }
    }
    sup_flat = std::max(sup_flat, col_flat);
    sup_deriv = std::max(sup_deriv, col_deriv);
  }
  spec.gamma = std::max(sup_flat, sup_deriv);

  return {evaluate(spec), spec};
}

Matrix equispaced_theta(std::int64_t n, int K) {
  if (n < 1 || K < 1) throw std::invalid_argument("equispaced_theta: n and K must be >= 1");
  std::int64_t m = -1;
  const auto root = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / K)));
  for (std::int64_t candidate = std::max<std::int64_t>(1, root - 1); candidate <= root + 1;
       ++candidate) {
    std::int64_t power = 1;
    for (int k = 0; k < K; ++k) power *= candidate;
    if (power == n) {
      m = candidate;
      break;
    }
  }
  if (m < 1) {
    throw std::invalid_argument("equispaced_theta: n must be a perfect K-th power");
  }

  Matrix theta(n, K);
  for (std::int64_t i = 0; i < n; ++i) {
    std::int64_t rest = i;
    for (int k = K - 1; k >= 0; --k) {
      theta(i, k) = static_cast<double>(rest % m + 1) / static_cast<double>(m);
      rest /= m;
    }
  }
  return theta;
}

}  // namespace smoothmc
