#include "smoothmc/covering.hpp"

#include <cmath>
#include <stdexcept>

namespace smoothmc {

std::int64_t j_star_count(double epsilon, int L, int K, double gamma) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("j_star_count: epsilon must be positive");
  if (L < 1 || K < 1) throw std::invalid_argument("j_star_count: L, K must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("j_star_count: gamma must be positive");

  double factorial = 1.0;
  for (int i = 2; i <= L; ++i) factorial *= i;
  const double d = std::pow(
      factorial * epsilon / (gamma * std::pow(static_cast<double>(K), L)), 1.0 / L);

  // Snap near-integer reciprocals before ceil so FP noise cannot shift the
  // cell count by one.
  const double inv = 1.0 / d;
  const double snapped = std::round(inv);
  const double cells_per_axis =
      std::abs(inv - snapped) <= 1e-9 * std::max(1.0, inv) ? snapped : std::ceil(inv);
  if (cells_per_axis > 1e15) throw std::invalid_argument("j_star_count: epsilon too small");

  double binom = 1.0;
  for (int i = 1; i <= L; ++i) binom = binom * (K + i) / i;

  const double count = std::round(binom) * std::pow(cells_per_axis, K);
  if (count > 9e18) throw std::invalid_argument("j_star_count: count overflows");
  return static_cast<std::int64_t>(count);
}

}  // namespace smoothmc
