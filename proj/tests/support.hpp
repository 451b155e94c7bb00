#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "hjleak/decomposition.hpp"
#include "hjleak/dynamics.hpp"
#include "hjleak/solver.hpp"
#include "hjleak/target.hpp"

namespace hjleak::testing {

// The 2D single-integrator experiment: [-4,4]^2, 101 points per dimension.
inline Grid si_grid() { return Grid({-4.0, -4.0}, {4.0, 4.0}, {101, 101}); }

inline TargetSpec abs_minus_one(Index dim) { return TargetSpec::axis(dim, true, 1.0, -1.0); }

inline DecomposedTargets si_targets(Combo combo = Combo::Intersection) {
  auto full = combo == Combo::Intersection ? TargetSpec::max_of({abs_minus_one(0), abs_minus_one(1)})
                                           : TargetSpec::min_of({abs_minus_one(0), abs_minus_one(1)});
  return {abs_minus_one(0), abs_minus_one(0), full};
}

inline SolverConfig si_config(double horizon, Mode mode = Mode::Reach) {
  SolverConfig c;
  c.delta = 0.02;
  c.horizon = horizon;
  c.mode = mode;
  c.dissipation = {0.0, 0.0};
  return c;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline std::vector<double> uniform_vector(std::mt19937_64& rng, std::span<const double> lo,
                                          std::span<const double> hi) {
  std::vector<double> v(lo.size());
  for (std::size_t d = 0; d < v.size(); ++d) v[d] = std::uniform_real_distribution<double>(lo[d], hi[d])(rng);
  return v;
}

}  // namespace hjleak::testing
