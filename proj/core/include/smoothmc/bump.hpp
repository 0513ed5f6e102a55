#pragma once

namespace smoothmc {

/// Scale and smoothness order for the compactly supported bump below.
struct BumpParams {
  double c_L = 1.0;
  int L = 1;
};

/// phi(u) = c_L * e * exp(-1 / (1 - 4u^2)) for |u| < 1/2, exactly 0 outside.
/// C-infinity everywhere; phi(0) = c_L.
double bump_phi(double u, const BumpParams& params);

/// Grid maximum of the order-th derivative of the unscaled bump (c_L = 1),
/// estimated by central finite differences with base step 1e-3, one
/// Richardson refinement, over a 1e5-point grid spanning the support.
/// order = 0 returns the plain grid maximum.
double bump_derivative_grid_max(int order);

/// True when c * bump_derivative_grid_max(l) <= 1 + 1e-3 for all l = 0..L.
bool bump_satisfies_derivative_bound(double c, int L);

/// Largest scale keeping every derivative order 0..L within the unit bound
/// above, found by bisection to resolution 1e-4. Decreases as L grows.
BumpParams calibrate_c_L(int L);

}  // namespace smoothmc
