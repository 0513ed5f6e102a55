#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smoothmc/matrix.hpp"
#include "smoothmc/rng.hpp"

namespace smoothmc {

enum class SamplingMode { with_replacement, without_replacement };

std::string to_string(SamplingMode mode);
SamplingMode sampling_mode_from_string(const std::string& s);

struct MaskIndex {
  std::int64_t row = 0;
  std::int64_t col = 0;

  bool operator==(const MaskIndex&) const = default;
};

struct Observation {
  MaskIndex index;
  double y = 0.0;
};

/// N uniformly sampled entries of an n x p matrix with additive Gaussian
/// noise: y_t = m(i_t, j_t) + sigma * xi_t.
struct ObservationSet {
  std::int64_t n = 0;
  std::int64_t p = 0;
  std::vector<Observation> samples;
  SamplingMode mode = SamplingMode::with_replacement;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;

  std::int64_t size() const { return static_cast<std::int64_t>(samples.size()); }

  /// Shape/range checks plus distinctness in without-replacement mode.
  void validate() const;
};

/// Uniform cell draws. with_replacement: count iid cells (duplicates
/// allowed). without_replacement: a uniform count-subset of the n*p cells,
/// emitted in row-major order; requires count <= n*p.
std::vector<MaskIndex> sample_masks(std::int64_t n, std::int64_t p, std::int64_t count,
                                    SamplingMode mode, Rng& rng);

/// Evaluates m at the masks and adds N(0, sigma^2) noise (no noise draws are
/// consumed when sigma == 0). The set's seed field records rng's construction
/// seed; callers may overwrite it when they track a different master seed.
ObservationSet observe(const Matrix& m, const std::vector<MaskIndex>& masks, double sigma,
                       Rng& rng, SamplingMode mode = SamplingMode::with_replacement);

/// R = (n*p/N) * sum_t y_t X_t, where X_t is the indicator of the sampled
/// cell. Duplicate masks accumulate.
Matrix build_R(const ObservationSet& obs);

/// Delta = (1/N) * sum_t y_t X_t - (1/(n*p)) * m, the deviation of the
/// empirical first moment from its expectation under uniform sampling.
Matrix empirical_delta(const ObservationSet& obs, const Matrix& m);

}  // namespace smoothmc
