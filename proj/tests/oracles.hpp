#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "hjleak/dynamics.hpp"
#include "hjleak/solver.hpp"

namespace hjleak::testing {

// Dense-sampling extremum of p'(f + G u) for two-input models. A single
// Euclidean ball is sampled in polar coordinates (101 radii x 400 angles) so
// the boundary is always included; two scalar boxes on a 101x101 lattice,
// which contains the vertices.
inline double brute_force_hamiltonian(const SystemModel& m, std::span<const double> z, std::span<const double> p,
                                      Mode mode) {
  const auto f = m.eval_drift(z);
  const auto g = m.eval_control_matrix(z);
  double drift = 0.0;
  for (Index d = 0; d < m.n; ++d) drift += p[d] * f[d];
  std::vector<double> q(m.m, 0.0);
  for (Index j = 0; j < m.m; ++j)
    for (Index d = 0; d < m.n; ++d) q[j] += p[d] * g[d * m.m + j];
  const bool reach = mode == Mode::Reach;
  double best = reach ? INFINITY : -INFINITY;
  auto consider = [&](double u0, double u1) {
    const double v = q[0] * u0 + q[1] * u1;
    best = reach ? std::min(best, v) : std::max(best, v);
  };
  if (m.constraints.size() == 1) {
    const double ubar = m.constraints[0].ubar;
    for (int r = 0; r <= 100; ++r)
      for (int a = 0; a < 400; ++a) {
        const double rad = ubar * r / 100.0, ang = 2.0 * std::numbers::pi * a / 400.0;
        consider(rad * std::cos(ang), rad * std::sin(ang));
      }
  } else {
    const double b0 = m.constraints[0].ubar, b1 = m.constraints[1].ubar;
    for (int i = 0; i <= 100; ++i)
      for (int k = 0; k <= 100; ++k) consider(-b0 + 2.0 * b0 * i / 100.0, -b1 + 2.0 * b1 * k / 100.0);
  }
  return drift + best;
}

}  // namespace hjleak::testing
