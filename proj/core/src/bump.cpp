#include "smoothmc/bump.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace smoothmc {

namespace {

double unscaled_bump(double u) {
  if (!(std::abs(u) < 0.5)) return 0.0;
  const double denom = 1.0 - 4.0 * u * u;
  if (denom <= 0.0) return 0.0;  // FP edge right at the support boundary
  return std::numbers::e * std::exp(-1.0 / denom);
}

double binomial(int n, int k) {
  double value = 1.0;
  for (int i = 1; i <= k; ++i) value = value * (n - k + i) / i;
  return value;
}

// Central difference of the given order with step h, nodes (order/2 - k)*h.
double central_difference(double u, int order, double h) {
  double acc = 0.0;
  for (int k = 0; k <= order; ++k) {
    const double node = u + (order / 2.0 - k) * h;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    acc += sign * binomial(order, k) * unscaled_bump(node);
  }
  return acc / std::pow(h, order);
}

constexpr int kGridPoints = 100000;
constexpr double kBaseStep = 1e-3;

}  // namespace

double bump_phi(double u, const BumpParams& params) {
  return params.c_L * unscaled_bump(u);
}

double bump_derivative_grid_max(int order) {
  if (order < 0) throw std::invalid_argument("bump_derivative_grid_max: order must be >= 0");
  static std::map<int, double> cache;
  static std::mutex cache_mutex;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (auto it = cache.find(order); it != cache.end()) return it->second;
  }

  double best = 0.0;
  const double step = 1.0 / (kGridPoints - 1);
  for (int i = 0; i < kGridPoints; ++i) {
    const double u = -0.5 + i * step;
    double value = 0.0;
    if (order == 0) {
      value = unscaled_bump(u);
    } else {
      const double coarse = central_difference(u, order, kBaseStep);
      const double fine = central_difference(u, order, kBaseStep / 2.0);
      value = (4.0 * fine - coarse) / 3.0;  // Richardson: kills the h^2 term
    }
    best = std::max(best, std::abs(value));
  }

  std::lock_guard<std::mutex> lock(cache_mutex);
  cache[order] = best;
  return best;
}

bool bump_satisfies_derivative_bound(double c, int L) {
  if (!(c >= 0.0)) throw std::invalid_argument("bump_satisfies_derivative_bound: c must be >= 0");
  if (L < 1) throw std::invalid_argument("bump_satisfies_derivative_bound: L must be >= 1");
  for (int order = 0; order <= L; ++order) {
    if (c * bump_derivative_grid_max(order) > 1.0 + 1e-3) return false;
  }
  return true;
}

BumpParams calibrate_c_L(int L) {
  if (L < 1) throw std::invalid_argument("calibrate_c_L: L must be >= 1");
  static std::map<int, double> cache;
  static std::mutex cache_mutex;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (auto it = cache.find(L); it != cache.end()) return BumpParams{it->second, L};
  }

  double lo = 0.0;
  double hi = 2.0;  // flat maximum is 1, so any admissible scale is below 2
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    if (bump_satisfies_derivative_bound(mid, L)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  std::lock_guard<std::mutex> lock(cache_mutex);
  cache[L] = lo;
  return BumpParams{lo, L};
}

}  // namespace smoothmc
