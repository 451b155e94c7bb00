#pragma once

#include <span>
#include <string>
#include <vector>

#include "hjleak/dynamics.hpp"
#include "hjleak/grid.hpp"
#include "hjleak/target.hpp"

namespace hjleak {

enum class Mode { Reach, Avoid };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);

struct HamiltonianResult {
  double value = 0.0;
  std::vector<double> u_star;
};

/// Closed-form extremum of p'f(z) + p'G(z)u over the constraint blocks:
/// minimized for reach, maximized for avoid. Each block contributes
/// -/+ ubar * ||q_b / alpha_b||_{beta*} with q = G(z)'p; a block with q_b = 0
/// contributes nothing and its u_star entries are 0.
HamiltonianResult hamiltonian_extremum(const SystemModel& model, std::span<const double> z,
                                       std::span<const double> p, Mode mode);

struct SolverConfig {
  double delta = 0.02;     // time step, seconds
  double horizon = -0.02;  // final time, <= 0, integer multiple of -delta
  Mode mode = Mode::Reach;
  // Empty means automatic global Lax-Friedrichs coefficients.
  std::vector<double> dissipation;
  unsigned workers = 1;

  void validate() const;
  Index steps() const;
  bool auto_dissipation() const { return dissipation.empty(); }
};

/// Time-indexed value arrays; times[0] = 0 and times[k] = -k * delta.
struct ValueSeries {
  Grid grid;
  std::vector<double> times;
  std::vector<std::vector<double>> slices;

  Index steps() const { return times.empty() ? 0 : times.size() - 1; }
  const std::vector<double>& final_slice() const { return slices.back(); }
  // Index of the stored time matching t within 1e-9; throws DomainError.
  Index time_index(double t) const;
};

/// First-order Lax-Friedrichs update for the terminal-value problem
/// D_t V + H(z, D_z V) = 0, stepping backward by delta:
///
///   V(s - delta) = V(s) + delta * [ H(z, p_central) + sum_d sigma_d (D+_d V - D-_d V) / 2 ]
///
/// Ghost values at the boundary are linear extrapolations, so the one-sided
/// difference there equals the interior one. The per-point update only reads
/// the input slice, so any subset of points may be updated independently.
class LaxFriedrichs {
 public:
  struct Workspace {
    std::vector<double> z, f, g, p, q;
    std::vector<Index> multi;
  };

  LaxFriedrichs(const SystemModel& model, const Grid& grid, const SolverConfig& config);

  const std::vector<double>& dissipation() const { return sigma_; }
  const std::vector<double>& speed_bounds() const { return speed_; }
  double cfl_number() const { return cfl_; }
  const Grid& grid() const { return grid_; }
  const SolverConfig& config() const { return config_; }

  Workspace make_workspace() const;
  double update_point(std::span<const double> slice, Index linear, Workspace& ws) const;
  std::vector<double> step(std::span<const double> slice) const;

 private:
  double update_with_multi(std::span<const double> slice, Index linear, Workspace& ws) const;

  SystemModel model_;
  Grid grid_;
  SolverConfig config_;
  std::vector<double> sigma_;
  std::vector<double> speed_;
  double cfl_ = 0.0;
};

std::vector<double> lax_friedrichs_step(const SystemModel& model, const Grid& grid, std::span<const double> slice,
                                        const SolverConfig& config);

ValueSeries solve_hjb(const SystemModel& model, const Grid& grid, const TargetSpec& target,
                      const SolverConfig& config);
// Solves on the subsystem grid (the full grid restricted to the subsystem's dims).
ValueSeries solve_hjb(const SubsystemModel& model, const Grid& full_grid, const TargetSpec& target,
                      const SolverConfig& config);

// Gradient at an off-grid state: multilinear interpolation of node-centered
// central differences, linear in time between stored slices.
std::vector<double> interpolate_gradient(const ValueSeries& series, std::span<const double> z, double t);

std::vector<double> extract_optimal_control(const SystemModel& model, const ValueSeries& series,
                                            std::span<const double> z, double t, Mode mode);

}  // namespace hjleak
