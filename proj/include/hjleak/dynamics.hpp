#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hjleak/grid.hpp"

namespace hjleak {

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// One weighted norm-ball constraint ||alpha ⊙ u_block||_beta <= ubar over a
/// subset of control components. beta may be kInfNorm.
struct ControlConstraintBlock {
  std::vector<Index> indices;
  std::vector<double> alpha;
  double beta = 2.0;
  double ubar = 1.0;

  void validate() const;
  // Largest |u_j| admissible for the k-th component of this block.
  double component_max(Index k) const { return ubar / alpha[k]; }
};

// Weighted beta-norm ||alpha ⊙ v||_beta.
double weighted_norm(std::span<const double> v, std::span<const double> alpha, double beta);
// 1/beta + 1/conj = 1, with conj(1) = inf and conj(inf) = 1.
double holder_conjugate(double beta);

// Row-major n×m matrix G(z) in zdot = f(z) + G(z) u.
using DriftFn = std::function<void(std::span<const double> z, std::span<double> out)>;
using ControlMatrixFn = std::function<void(std::span<const double> z, std::span<double> out)>;

// Entrywise magnitude bounds of f (n) and G (n*m) over an axis-aligned box.
struct DynamicsBounds {
  std::vector<double> drift;
  std::vector<double> control;
};
using BoundsFn = std::function<DynamicsBounds(std::span<const double> mins, std::span<const double> maxs)>;

/// Control-affine system zdot = f(z) + G(z) u with block norm constraints on u.
/// Callbacks must be pure; the model is immutable once built.
struct SystemModel {
  std::string name;
  Index n = 0;
  Index m = 0;
  DriftFn drift;
  ControlMatrixFn control_matrix;
  std::vector<ControlConstraintBlock> constraints;
  // Empty z1/z2 means no decomposition is declared for this model.
  PartitionSchema schema;
  // Optional closed-form bounds; when empty they are found by sampling the grid.
  BoundsFn bounds;

  bool has_schema() const { return !schema.z1_dims.empty(); }
  void validate() const;

  std::vector<double> eval_drift(std::span<const double> z) const;
  std::vector<double> eval_control_matrix(std::span<const double> z) const;
  // Per-component bound on |u_j| implied by its constraint block.
  std::vector<double> control_max() const;
};

struct SubsystemModel {
  std::shared_ptr<const SystemModel> parent;
  int which = 1;
  std::vector<Index> state_dims;           // parent state dims, subsystem order (z_i, z_c)
  std::vector<Index> control_idx;          // parent control indices kept, (u_i, u_c) minus zeroed
  std::vector<Index> restricted_controls;  // parent control indices forced to zero
  SystemModel reduced;                     // evaluable model over the subsystem state

  Index sub_n() const { return state_dims.size(); }
  Index sub_m() const { return control_idx.size(); }
};

SystemModel make_single_integrator_2d(double ubar);
SystemModel make_planar_quadrotor_6d(double ubar_thrust, double ubar_torque, double gravity);

SubsystemModel restrict_to_subsystem(const SystemModel& model, int which, const std::vector<Index>& zero_controls);

// max over blocks of ||alpha ⊙ u_block||_beta - ubar; feasible iff <= 0.
double joint_constraint_eval(const SystemModel& model, std::span<const double> u);

// Samples the grid box and checks that subsystem rows of f and G do not
// depend on the other subsystem's exclusive state, and that the other
// subsystem's exclusive controls do not enter. Throws DecompositionError.
void check_self_contained(const SystemModel& model, int which, const Grid& grid, int samples = 256);

// Entrywise bounds of |f| and |G| over the grid: closed form when the model
// provides one, otherwise the maximum over all grid nodes.
DynamicsBounds dynamics_bounds(const SystemModel& model, const Grid& grid);

}  // namespace hjleak
