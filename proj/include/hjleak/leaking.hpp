#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hjleak/decomposition.hpp"
#include "hjleak/solver.hpp"

namespace hjleak {

/// Detected leaking corners: one boolean array per stored time.
struct LeakingMask {
  Grid grid;
  std::vector<double> times;
  std::vector<std::vector<std::uint8_t>> marked;
  // Manual threshold per time, or the largest per-point threshold seen in auto mode.
  std::vector<double> delta_used;
  bool manual = false;

  Index count(Index k) const;
};

struct Island {
  Index id = 0;
  std::vector<Index> points;  // ascending linear indices
  double time = 0.0;
};

/// Marks z at time t iff |V1 - V2| < delta(z, t), where delta comes from the
/// restricted sub-value of the subsystem that does not attain the
/// reconstruction (reach: the smaller one; avoid: the larger one). The
/// terminal slice is never marked.
LeakingMask detect(const SubValuePair& pair, const RestrictedSubvalues& restricted, ReconstructionMode mode);
// Same test with one scalar threshold per non-terminal time stamp (times[1..]).
LeakingMask detect(const SubValuePair& pair, std::span<const double> manual_delta, ReconstructionMode mode);
// Dispatch used by pipelines; throws ConfigError when neither source is given.
LeakingMask detect(const SubValuePair& pair, const RestrictedSubvalues* restricted,
                   std::span<const double> manual_delta, ReconstructionMode mode);

// Face-adjacency connected components of mask slice k, ordered by smallest index.
std::vector<Island> islands(const LeakingMask& mask, Index k);
std::vector<Island> islands(const Grid& grid, std::span<const std::uint8_t> marked, double time = 0.0);

struct LocalUpdateResult {
  ValueSeries corrected;
  std::vector<Index> updates_per_step;             // per-point HJ updates, indexed like times
  std::vector<std::vector<std::uint8_t>> touched;  // points recomputed at each time
};

/// Frontier-expanding local correction of an approximated value series.
///
/// Walking backward from t = 0, slice s - delta starts as a copy of v_hat.
/// Points detected at s - delta are recomputed with the full-dimensional
/// scheme (stencil read from the corrected slice at s). Whenever a recomputed
/// value differs from v_hat by more than `frontier_threshold`, its face
/// neighbours join the next frontier; frontier waves repeat until no new
/// point is reached. Each point is updated at most once per step.
LocalUpdateResult local_update(const SystemModel& model, const ValueSeries& v_hat, const LeakingMask& mask,
                               const SolverConfig& config, double frontier_threshold = 1e-6);

struct Comparison {
  Index mismatches = 0;
  double avg_abs_diff = 0.0;
  double max_abs_diff = 0.0;
};

Comparison compare_slices(std::span<const double> a, std::span<const double> b, double threshold);
// Compares the final time slices; grids and time stamps must agree.
Comparison compare(const ValueSeries& a, const ValueSeries& b, double threshold);

struct RunReport {
  bool has_comparison = false;  // direct and decomposed both ran
  bool has_correction = false;  // local update ran
  Comparison before, after;
  Index detected = 0;       // marked points at the final time
  Index islands = 0;        // islands of the final-time mask
  Index local_updates = 0;  // total per-point updates in the correction
  double t_direct = 0.0, t_decomposed = 0.0, t_local_update = 0.0;
  std::vector<double> delta_per_time;
};

}  // namespace hjleak
