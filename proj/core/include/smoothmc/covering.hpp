#pragma once

#include <cstdint>

namespace smoothmc {

/// Sufficient linear dimension for uniform accuracy epsilon over the
/// derivative-bounded class (order L, dimension K, envelope gamma):
///   d = (L! / (gamma K^L))^(1/L) * epsilon^(1/L),
///   count = binom(K + L, L) * ceil(1/d)^K.
/// Grows like epsilon^(-K/L) as epsilon -> 0.
std::int64_t j_star_count(double epsilon, int L, int K, double gamma);

}  // namespace smoothmc
