#include "smoothmc/packing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace smoothmc {

namespace {

std::int64_t integral_root(std::int64_t value, int K, const char* what) {
  const auto guess =
      static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(value), 1.0 / K)));
  for (std::int64_t candidate = std::max<std::int64_t>(1, guess - 1); candidate <= guess + 1;
       ++candidate) {
    std::int64_t power = 1;
    for (int k = 0; k < K; ++k) power *= candidate;
    if (power == value) return candidate;
  }
  throw std::invalid_argument(std::string(what) + " must be a perfect K-th power");
}

std::vector<int> cell_to_multi_index(std::int64_t cell, std::int64_t axis, int K) {
  std::vector<int> d(static_cast<std::size_t>(K));
  for (int k = K - 1; k >= 0; --k) {
    d[static_cast<std::size_t>(k)] = static_cast<int>(cell % axis) + 1;
    cell /= axis;
  }
  return d;
}

void append_compositions(int remaining, int slots, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
  if (slots == 1) {
    current.push_back(remaining);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int take = 0; take <= remaining; ++take) {
    current.push_back(take);
    append_compositions(remaining - take, slots - 1, current, out);
    current.pop_back();
  }
}

std::int64_t hamming(const CodeWord& a, const CodeWord& b) {
  std::int64_t dist = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dist += a[i] != b[i];
  return dist;
}

}  // namespace

double cell_bump(const Vector& theta, const std::vector<int>& d, std::int64_t b,
                 const SmoothnessClass& smoothness, const BumpParams& bump) {
  smoothness.validate();
  const int K = smoothness.K;
  if (theta.size() != K || static_cast<int>(d.size()) != K) {
    throw std::invalid_argument("cell_bump: theta and d must have K entries");
  }
  const std::int64_t axis = integral_root(b, K, "cell_bump: b");
  const double scale =
      smoothness.gamma * std::pow(static_cast<double>(axis), -static_cast<double>(smoothness.L));
  double value = scale;
  for (int k = 0; k < K; ++k) {
    if (d[static_cast<std::size_t>(k)] < 1 || d[static_cast<std::size_t>(k)] > axis) {
      throw std::invalid_argument("cell_bump: cell index out of range");
    }
    const double u = static_cast<double>(axis) * theta(k) - d[static_cast<std::size_t>(k)] + 0.5;
    value *= bump_phi(u, BumpParams{bump.c_L, smoothness.L});
    if (value == 0.0) return 0.0;
  }
  return value;
}

Matrix cell_bump_design(const Matrix& theta, std::int64_t b, const SmoothnessClass& smoothness,
                        const BumpParams& bump) {
  smoothness.validate();
  if (theta.cols() != smoothness.K) {
    throw std::invalid_argument("cell_bump_design: theta must have K columns");
  }
  const std::int64_t axis = integral_root(b, smoothness.K, "cell_bump_design: b");
  const Eigen::Index n = theta.rows();
  Matrix design(n, b);
  for (std::int64_t cell = 0; cell < b; ++cell) {
    const std::vector<int> d = cell_to_multi_index(cell, axis, smoothness.K);
    for (Eigen::Index i = 0; i < n; ++i) {
      design(i, cell) = cell_bump(theta.row(i).transpose(), d, b, smoothness, bump);
    }
  }
  return design;
}

EnergyBounds check_cell_energy_bounds(std::int64_t n, std::int64_t b,
                                      const SmoothnessClass& smoothness) {
  smoothness.validate();
  const double validity_cap = std::pow(0.48, smoothness.K) * static_cast<double>(n);
  if (b < 1 || static_cast<double>(b) > validity_cap) {
    throw std::invalid_argument("check_cell_energy_bounds: need 1 <= b <= 0.48^K * n");
  }
  const Matrix theta = equispaced_theta(n, smoothness.K);
  const BumpParams bump = calibrate_c_L(smoothness.L);
  const Matrix design = cell_bump_design(theta, b, smoothness, bump);

  EnergyBounds out;
  out.min_value = std::numeric_limits<double>::infinity();
  out.max_value = 0.0;
  for (std::int64_t cell = 0; cell < b; ++cell) {
    const double energy = design.col(cell).squaredNorm() / static_cast<double>(n);
    out.min_value = std::min(out.min_value, energy);
    out.max_value = std::max(out.max_value, energy);
  }
  const double rate = std::pow(static_cast<double>(b),
                               -(2.0 * smoothness.L + smoothness.K) / smoothness.K);
  const double gamma2 = smoothness.gamma * smoothness.gamma;
  out.lower = gamma2 * std::pow(0.1 * bump.c_L, 2.0 * smoothness.K) * rate;
  out.upper = gamma2 * std::pow(bump.c_L, 2.0 * smoothness.K) * rate;
  return out;
}

std::vector<CodeWord> varshamov_gilbert_codes(std::int64_t b, std::int64_t p, int count,
                                              Rng& rng) {
  if (b < 1 || p < 1) throw std::invalid_argument("varshamov_gilbert_codes: b, p must be >= 1");
  if (count < 1) throw std::invalid_argument("varshamov_gilbert_codes: count must be >= 1");
  const std::int64_t length = b * p;
  const double capacity = std::exp2(static_cast<double>(length) / 8.0);
  if (static_cast<double>(count) > capacity) {
    throw std::invalid_argument("varshamov_gilbert_codes: count exceeds 2^(b*p/8)");
  }
  const double min_distance = static_cast<double>(length) / 8.0;

  std::vector<CodeWord> codes;
  codes.reserve(static_cast<std::size_t>(count));
  const long long max_attempts = 200000LL + 2000LL * count;
  for (long long attempt = 0; attempt < max_attempts && std::cmp_less(codes.size(), count);
       ++attempt) {
    CodeWord candidate(static_cast<std::size_t>(length));
    for (auto& bit : candidate) bit = static_cast<std::uint8_t>(rng.next_u64() >> 63);
    bool accept = true;
    for (const CodeWord& existing : codes) {
      if (static_cast<double>(hamming(candidate, existing)) < min_distance) {
        accept = false;
        break;
      }
    }
    if (accept) codes.push_back(std::move(candidate));
  }
  if (std::cmp_less(codes.size(), count)) {
    throw std::runtime_error("varshamov_gilbert_codes: rejection stalled after " +
                             std::to_string(max_attempts) + " attempts");
  }
  return codes;
}

Matrix packing_matrix(const CodeWord& code, const Matrix& theta, std::int64_t p, std::int64_t b,
                      const SmoothnessClass& smoothness, const BumpParams& bump) {
  if (std::cmp_not_equal(code.size(), b * p)) {
    throw std::invalid_argument("packing_matrix: codeword length must be b*p");
  }
  const Matrix design = cell_bump_design(theta, b, smoothness, bump);
  Matrix w(b, p);
  for (std::int64_t cell = 0; cell < b; ++cell) {
    for (std::int64_t j = 0; j < p; ++j) {
      w(cell, j) = static_cast<double>(code[static_cast<std::size_t>(cell * p + j)]);
    }
  }
  return design * w;
}

PackingSet build_packing(std::int64_t n, std::int64_t p, std::int64_t b,
                         const SmoothnessClass& smoothness, int count, Rng& rng) {
  smoothness.validate();
  if (p < 1) throw std::invalid_argument("build_packing: p must be >= 1");

  PackingSet out;
  out.b = b;
  out.smoothness = smoothness;
  out.bump = calibrate_c_L(smoothness.L);
  out.theta = equispaced_theta(n, smoothness.K);
  integral_root(b, smoothness.K, "build_packing: b");
  out.codes = varshamov_gilbert_codes(b, p, count, rng);
  out.matrices.reserve(out.codes.size());
  for (const CodeWord& code : out.codes) {
    out.matrices.push_back(packing_matrix(code, out.theta, p, b, smoothness, out.bump));
  }
  return out;
}

double separation_check(const PackingSet& packing) {
  if (packing.matrices.size() < 2) {
    throw std::invalid_argument("separation_check: need at least two matrices");
  }
  double min_sep = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < packing.matrices.size(); ++s) {
    for (std::size_t t = s + 1; t < packing.matrices.size(); ++t) {
      min_sep = std::min(min_sep, frobenius_mse(packing.matrices[s], packing.matrices[t]));
    }
  }
  return min_sep;
}

double separation_bound(const PackingSet& packing) {
  const SmoothnessClass& sc = packing.smoothness;
  const double gamma2 = sc.gamma * sc.gamma;
  return gamma2 * std::pow(0.1 * packing.bump.c_L, 2.0 * sc.K) / 8.0 *
         std::pow(static_cast<double>(packing.b), -2.0 * sc.L / sc.K);
}

double kl_between_hypotheses(const Matrix& m_s, const Matrix& m_t, std::int64_t num_samples,
                             double sigma) {
  if (m_s.rows() != m_t.rows() || m_s.cols() != m_t.cols()) {
    throw std::invalid_argument("kl_between_hypotheses: dimension mismatch");
  }
  if (num_samples < 1) throw std::invalid_argument("kl_between_hypotheses: num_samples must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("kl_between_hypotheses: sigma must be positive");
  double sq = 0.0;
  for (Eigen::Index j = 0; j < m_s.cols(); ++j) {
    for (Eigen::Index i = 0; i < m_s.rows(); ++i) {
      const double diff = m_s(i, j) - m_t(i, j);
      sq += diff * diff;
    }
  }
  const double cells = static_cast<double>(m_s.rows()) * static_cast<double>(m_s.cols());
  return static_cast<double>(num_samples) / (2.0 * sigma * sigma * cells) * sq;
}

bool PackingCertificate::all_ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
}

PackingCertificate certify_packing(const PackingSet& packing, std::int64_t kl_num_samples,
                                   double kl_sigma) {
  if (packing.matrices.size() < 2 || packing.codes.size() != packing.matrices.size()) {
    throw std::invalid_argument("certify_packing: need a built packing with >= 2 hypotheses");
  }
  const std::int64_t n = packing.theta.rows();
  const std::int64_t p = packing.matrices.front().cols();
  const int count = static_cast<int>(packing.matrices.size());

  PackingCertificate cert;
  cert.b = packing.b;
  cert.count = count;
  cert.c_L = packing.bump.c_L;

  // Disjoint supports: no latent point may activate two cells.
  const Matrix design = cell_bump_design(packing.theta, packing.b, packing.smoothness, packing.bump);
  bool disjoint = true;
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    int active = 0;
    for (Eigen::Index c = 0; c < design.cols(); ++c) active += design(i, c) != 0.0;
    if (active > 1) disjoint = false;
  }
  cert.checks.emplace_back("disjoint_support", disjoint);

  const EnergyBounds energy = check_cell_energy_bounds(n, packing.b, packing.smoothness);
  cert.checks.emplace_back("cell_energy_lower", energy.lower_ok());
  cert.checks.emplace_back("cell_energy_upper", energy.upper_ok());

  const double min_distance = static_cast<double>(packing.b * p) / 8.0;
  bool hamming_ok = true;
  for (std::size_t s = 0; s < packing.codes.size(); ++s) {
    for (std::size_t t = s + 1; t < packing.codes.size(); ++t) {
      std::int64_t dist = 0;
      for (std::size_t i = 0; i < packing.codes[s].size(); ++i) {
        dist += packing.codes[s][i] != packing.codes[t][i];
      }
      if (static_cast<double>(dist) < min_distance) hamming_ok = false;
    }
  }
  cert.checks.emplace_back("hamming_distance", hamming_ok);

  cert.min_separation = separation_check(packing);
  cert.bound = separation_bound(packing);
  cert.checks.emplace_back("separation", cert.min_separation >= cert.bound);

  cert.kl = Matrix::Zero(count, count);
  bool kl_identity_ok = true;
  for (int s = 0; s < count; ++s) {
    for (int t = 0; t < count; ++t) {
      if (s == t) continue;
      const double kl =
          kl_between_hypotheses(packing.matrices[static_cast<std::size_t>(s)],
                                packing.matrices[static_cast<std::size_t>(t)], kl_num_samples,
                                kl_sigma);
      cert.kl(s, t) = kl;
      const double via_mse = static_cast<double>(kl_num_samples) / (2.0 * kl_sigma * kl_sigma) *
                             frobenius_mse(packing.matrices[static_cast<std::size_t>(s)],
                                           packing.matrices[static_cast<std::size_t>(t)]);
      if (std::abs(kl - via_mse) > 1e-12 * std::max(1.0, kl)) kl_identity_ok = false;
    }
  }
  cert.checks.emplace_back("kl_identity", kl_identity_ok);

  bool rank_ok = true;
  for (const Matrix& m : packing.matrices) {
    const Vector sv = singular_values(m);
    const double cutoff = 1e-10 * std::max(sv(0), 1e-300);
    const auto rank = (sv.array() > cutoff).count();
    if (rank > packing.b) rank_ok = false;
  }
  cert.checks.emplace_back("rank_bound", rank_ok);

  bool smooth_ok = true;
  for (const Matrix& m : packing.matrices) {
    if (max_grid_derivative(m, packing.smoothness.L, packing.smoothness.K) >
        packing.smoothness.gamma * 1.1) {
      smooth_ok = false;
    }
  }
  cert.checks.emplace_back("smoothness_bound", smooth_ok);

  return cert;
}

double max_grid_derivative(const Matrix& m, int L, int K) {
  if (L < 1 || K < 1) throw std::invalid_argument("max_grid_derivative: L, K must be >= 1");
  const std::int64_t n = m.rows();
  const std::int64_t axis = integral_root(n, K, "max_grid_derivative: rows");
  if (axis <= L) throw std::invalid_argument("max_grid_derivative: grid too small for order L");
  const double h = 1.0 / static_cast<double>(axis);

  std::vector<std::vector<int>> compositions;
  std::vector<int> current;
  append_compositions(L, K, current, compositions);

  const auto flatten = [&](const std::vector<std::int64_t>& idx,
                           const std::vector<std::int64_t>& extents) {
    std::int64_t flat = 0;
    for (int k = 0; k < K; ++k) flat = flat * extents[static_cast<std::size_t>(k)] + idx[static_cast<std::size_t>(k)];
    return flat;
  };

  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (const std::vector<int>& comp : compositions) {
      std::vector<std::int64_t> extents(static_cast<std::size_t>(K), axis);
      std::vector<double> tensor(static_cast<std::size_t>(n));
      for (std::int64_t i = 0; i < n; ++i) tensor[static_cast<std::size_t>(i)] = m(i, j);

      for (int k = 0; k < K; ++k) {
        for (int rep = 0; rep < comp[static_cast<std::size_t>(k)]; ++rep) {
          std::vector<std::int64_t> new_extents = extents;
          new_extents[static_cast<std::size_t>(k)] -= 1;
          std::int64_t total = 1;
          for (std::int64_t e : new_extents) total *= e;
          std::vector<double> next(static_cast<std::size_t>(total));
          std::vector<std::int64_t> idx(static_cast<std::size_t>(K), 0);
          for (std::int64_t flat = 0; flat < total; ++flat) {
            std::vector<std::int64_t> hi = idx;
            hi[static_cast<std::size_t>(k)] += 1;
            next[static_cast<std::size_t>(flat)] =
                tensor[static_cast<std::size_t>(flatten(hi, extents))] -
                tensor[static_cast<std::size_t>(flatten(idx, extents))];
            for (int d = K - 1; d >= 0; --d) {
              if (++idx[static_cast<std::size_t>(d)] < new_extents[static_cast<std::size_t>(d)]) break;
              idx[static_cast<std::size_t>(d)] = 0;
            }
          }
          tensor = std::move(next);
          extents = std::move(new_extents);
        }
      }

      for (double v : tensor) worst = std::max(worst, std::abs(v));
    }
  }
  return worst / std::pow(h, L);
}

}  // namespace smoothmc
