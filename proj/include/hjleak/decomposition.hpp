#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hjleak/dynamics.hpp"
#include "hjleak/grid.hpp"
#include "hjleak/solver.hpp"
#include "hjleak/target.hpp"

namespace hjleak {

enum class Combo { Intersection, Union };

std::string to_string(Combo combo);
Combo combo_from_string(const std::string& s);

struct ReconstructionMode {
  Combo combo = Combo::Intersection;
  Mode problem = Mode::Reach;

  // Only intersection-reach and union-avoid can produce leaking corners.
  bool leaking_possible() const {
    return (combo == Combo::Intersection && problem == Mode::Reach) ||
           (combo == Combo::Union && problem == Mode::Avoid);
  }
};

/// A subsystem series viewed on the full grid: value(z, t) = sub(proj(z), t).
/// No interpolation; the subsystem grid is a restriction of the full grid.
class LiftedSeries {
 public:
  LiftedSeries(const ValueSeries& sub, const Grid& full, std::vector<Index> dims);

  double at(Index k, Index full_linear) const { return sub_->slices[k][proj_(full_linear)]; }
  std::vector<double> slice(Index k) const;
  Index size() const { return full_.size(); }
  const std::vector<double>& times() const { return sub_->times; }
  const ValueSeries& series() const { return *sub_; }
  const Projection& projection() const { return proj_; }

 private:
  const ValueSeries* sub_;
  Grid full_;
  Projection proj_;
};

struct SubValuePair {
  Grid full_grid;
  std::vector<Index> dims1, dims2;
  ValueSeries sub1, sub2;

  LiftedSeries lifted1() const { return LiftedSeries(sub1, full_grid, dims1); }
  LiftedSeries lifted2() const { return LiftedSeries(sub2, full_grid, dims2); }
};

/// Terminal costs for the two subsystems (in subsystem coordinates) and,
/// optionally, the full-dimensional cost they must reproduce at t = 0.
struct DecomposedTargets {
  TargetSpec sub1;
  TargetSpec sub2;
  std::optional<TargetSpec> full;
};

// Subsystem solver settings: manual dissipation restricted to `dims`.
SolverConfig restrict_config(const SolverConfig& config, const std::vector<Index>& dims);

// Rejects (l, l1, l2) unless max/min of the lifted l_i equals l on the grid.
void check_terminal_consistency(const SystemModel& model, const Grid& grid, const DecomposedTargets& targets,
                                Combo combo, double tol = 1e-12);

SubValuePair solve_decomposed(const SystemModel& model, const Grid& grid, const DecomposedTargets& targets,
                              ReconstructionMode mode, const SolverConfig& config);

// Pointwise max (intersection) or min (union) of the lifted sub-values.
ValueSeries reconstruct(const SubValuePair& pair, ReconstructionMode mode);

using RestrictedSubvalues = std::pair<ValueSeries, ValueSeries>;

/// Sub-values with each subsystem's exclusive controls forced to zero, on the
/// same time stamps as solve_decomposed. Only defined for models without
/// shared controls; otherwise throws ConfigError and a manual threshold is needed.
/// Self-containment is not re-sampled here; it is checked by solve_decomposed.
RestrictedSubvalues solve_restricted_subvalues(const SystemModel& model, const Grid& grid,
                                               const DecomposedTargets& targets, ReconstructionMode mode,
                                               const SolverConfig& config);

}  // namespace hjleak
