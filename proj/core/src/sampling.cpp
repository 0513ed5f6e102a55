#include "smoothmc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace smoothmc {

std::string to_string(SamplingMode mode) {
  switch (mode) {
    case SamplingMode::with_replacement: return "with_replacement";
    case SamplingMode::without_replacement: return "without_replacement";
  }
  throw std::invalid_argument("to_string: unknown SamplingMode");
}

SamplingMode sampling_mode_from_string(const std::string& s) {
  if (s == "with_replacement") return SamplingMode::with_replacement;
  if (s == "without_replacement") return SamplingMode::without_replacement;
  throw std::invalid_argument("unknown sampling mode: " + s);
}

void ObservationSet::validate() const {
  if (n < 1 || p < 1) throw std::invalid_argument("ObservationSet: n and p must be >= 1");
  if (samples.empty()) throw std::invalid_argument("ObservationSet: needs at least one sample");
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("ObservationSet: noise_sd must be >= 0");
  for (const Observation& s : samples) {
    if (s.index.row < 0 || s.index.row >= n || s.index.col < 0 || s.index.col >= p) {
      throw std::invalid_argument("ObservationSet: mask index out of range");
    }
    if (!std::isfinite(s.y)) throw std::invalid_argument("ObservationSet: non-finite y");
  }
  if (mode == SamplingMode::without_replacement) {
    if (size() > n * p) {
      throw std::invalid_argument("ObservationSet: more samples than cells without replacement");
    }
    std::unordered_set<std::int64_t> seen;
    seen.reserve(samples.size());
    for (const Observation& s : samples) {
      if (!seen.insert(s.index.row * p + s.index.col).second) {
        throw std::invalid_argument("ObservationSet: duplicate mask without replacement");
      }
    }
  }
}

std::vector<MaskIndex> sample_masks(std::int64_t n, std::int64_t p, std::int64_t count,
                                    SamplingMode mode, Rng& rng) {
  if (n < 1 || p < 1) throw std::invalid_argument("sample_masks: n and p must be >= 1");
  if (count < 1) throw std::invalid_argument("sample_masks: count must be >= 1");
  const std::int64_t cells = n * p;

  std::vector<MaskIndex> masks;
  masks.reserve(static_cast<std::size_t>(count));

  if (mode == SamplingMode::with_replacement) {
    for (std::int64_t t = 0; t < count; ++t) {
      const auto cell = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(cells)));
      masks.push_back({cell / p, cell % p});
    }
    return masks;
  }

  if (count > cells) {
    throw std::invalid_argument("sample_masks: count exceeds n*p without replacement");
  }
  // Selection sampling (Knuth's Algorithm S): walk the cells in row-major
  // order and keep each with probability needed/remaining. Exact uniform
  // subsets in O(n*p) time and O(count) extra space.
  std::int64_t needed = count;
  for (std::int64_t cell = 0; cell < cells && needed > 0; ++cell) {
    const std::int64_t remaining = cells - cell;
    if (rng.next_uniform() * static_cast<double>(remaining) < static_cast<double>(needed)) {
      masks.push_back({cell / p, cell % p});
      --needed;
    }
  }
  // needed can only be nonzero through FP pathology; the tail guard keeps the
  // contract exact.
  for (std::int64_t cell = cells - needed; needed > 0; ++cell, --needed) {
    masks.push_back({cell / p, cell % p});
  }
  return masks;
}

ObservationSet observe(const Matrix& m, const std::vector<MaskIndex>& masks, double sigma,
                       Rng& rng, SamplingMode mode) {
  if (m.rows() == 0 || m.cols() == 0) throw std::invalid_argument("observe: empty matrix");
  if (!m.allFinite()) throw std::invalid_argument("observe: matrix contains NaN or Inf");
  if (masks.empty()) throw std::invalid_argument("observe: needs at least one mask");
  if (!(sigma >= 0.0)) throw std::invalid_argument("observe: sigma must be >= 0");

  ObservationSet out;
  out.n = m.rows();
  out.p = m.cols();
  out.mode = mode;
  out.noise_sd = sigma;
  out.seed = rng.seed();
  out.samples.reserve(masks.size());
  for (const MaskIndex& idx : masks) {
    if (idx.row < 0 || idx.row >= out.n || idx.col < 0 || idx.col >= out.p) {
      throw std::invalid_argument("observe: mask index out of range");
    }
    double y = m(idx.row, idx.col);
    if (sigma > 0.0) y += sigma * rng.next_gaussian();
    out.samples.push_back({idx, y});
  }
  return out;
}

Matrix build_R(const ObservationSet& obs) {
  obs.validate();
  Matrix r = Matrix::Zero(obs.n, obs.p);
  for (const Observation& s : obs.samples) r(s.index.row, s.index.col) += s.y;
  const double scale = static_cast<double>(obs.n) * static_cast<double>(obs.p) /
                       static_cast<double>(obs.size());
  r *= scale;
  return r;
}

Matrix empirical_delta(const ObservationSet& obs, const Matrix& m) {
  obs.validate();
  if (m.rows() != obs.n || m.cols() != obs.p) {
    throw std::invalid_argument("empirical_delta: matrix shape does not match observations");
  }
  Matrix delta = Matrix::Zero(obs.n, obs.p);
  for (const Observation& s : obs.samples) delta(s.index.row, s.index.col) += s.y;
  delta /= static_cast<double>(obs.size());
  const double cells = static_cast<double>(obs.n) * static_cast<double>(obs.p);
  delta -= m / cells;
  return delta;
}

}  // namespace smoothmc
