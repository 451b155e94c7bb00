#include "hjleak/leaking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hjleak/errors.hpp"

namespace hjleak {

Index LeakingMask::count(Index k) const {
  return static_cast<Index>(std::count(marked.at(k).begin(), marked.at(k).end(), std::uint8_t{1}));
}

namespace {

LeakingMask empty_mask(const SubValuePair& pair) {
  if (pair.sub1.times != pair.sub2.times) throw DomainError("subsystem series are not time-aligned");
  LeakingMask mask;
  mask.grid = pair.full_grid;
  mask.times = pair.sub1.times;
  mask.marked.assign(mask.times.size(), std::vector<std::uint8_t>(mask.grid.size(), 0));
  mask.delta_used.assign(mask.times.size(), 0.0);
  return mask;
}

}  // namespace

LeakingMask detect(const SubValuePair& pair, const RestrictedSubvalues& restricted, ReconstructionMode mode) {
  LeakingMask mask = empty_mask(pair);
  if (restricted.first.times != mask.times || restricted.second.times != mask.times)
    throw DomainError("restricted sub-values are not time-aligned with the decomposition");
  const LiftedSeries v1 = pair.lifted1(), v2 = pair.lifted2();
  if (!(restricted.first.grid == pair.sub1.grid) || !(restricted.second.grid == pair.sub2.grid))
    throw DomainError("restricted sub-values are not on the subsystem grids");
  for (Index k = 1; k < mask.times.size(); ++k) {
    auto& m = mask.marked[k];
    const auto &s1 = pair.sub1.slices[k], &s2 = pair.sub2.slices[k];
    const auto &t1 = restricted.first.slices[k], &t2 = restricted.second.slices[k];
    double widest = 0.0;
    Projection::for_each_pair(v1.projection(), v2.projection(), 0, m.size(), [&](Index i, Index j1, Index j2) {
      const double a = s1[j1], b = s2[j2];
      const bool use_first = mode.problem == Mode::Reach ? b >= a : a >= b;
      const double delta = use_first ? std::abs(t1[j1] - a) : std::abs(t2[j2] - b);
      widest = std::max(widest, delta);
      m[i] = std::abs(a - b) < delta ? 1 : 0;
    });
    mask.delta_used[k] = widest;
  }
  return mask;
}

LeakingMask detect(const SubValuePair& pair, std::span<const double> manual_delta, ReconstructionMode) {
  LeakingMask mask = empty_mask(pair);
  if (manual_delta.size() + 1 != mask.times.size())
    throw ConfigError("manual threshold list needs one value per non-terminal time stamp (" +
                      std::to_string(mask.times.size() - 1) + "), got " + std::to_string(manual_delta.size()));
  mask.manual = true;
  const LiftedSeries v1 = pair.lifted1(), v2 = pair.lifted2();
  for (Index k = 1; k < mask.times.size(); ++k) {
    const double delta = manual_delta[k - 1];
    if (!(delta >= 0.0)) throw ConfigError("manual thresholds must be nonnegative");
    mask.delta_used[k] = delta;
    auto& m = mask.marked[k];
    const auto &s1 = pair.sub1.slices[k], &s2 = pair.sub2.slices[k];
    Projection::for_each_pair(v1.projection(), v2.projection(), 0, m.size(), [&](Index i, Index j1, Index j2) {
      m[i] = std::abs(s1[j1] - s2[j2]) < delta ? 1 : 0;
    });
  }
  return mask;
}

LeakingMask detect(const SubValuePair& pair, const RestrictedSubvalues* restricted,
                   std::span<const double> manual_delta, ReconstructionMode mode) {
  if (!manual_delta.empty()) return detect(pair, manual_delta, mode);
  if (restricted) return detect(pair, *restricted, mode);
  throw ConfigError("leaking detection needs restricted sub-values or manual thresholds");
}

std::vector<Island> islands(const Grid& grid, std::span<const std::uint8_t> marked, double time) {
  if (marked.size() != grid.size()) throw DomainError("mask size does not match grid");
  std::vector<Island> out;
  std::vector<std::uint8_t> seen(grid.size(), 0);
  std::vector<Index> stack;
  for (Index start = 0; start < grid.size(); ++start) {
    if (!marked[start] || seen[start]) continue;
    Island island{out.size(), {}, time};
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const Index cur = stack.back();
      stack.pop_back();
      island.points.push_back(cur);
      grid.for_each_neighbor(cur, [&](Index n) {
        if (marked[n] && !seen[n]) {
          seen[n] = 1;
          stack.push_back(n);
        }
      });
    }
    std::sort(island.points.begin(), island.points.end());
    out.push_back(std::move(island));
  }
  return out;
}

std::vector<Island> islands(const LeakingMask& mask, Index k) {
  if (k >= mask.marked.size()) throw DomainError("mask time index out of range");
  return islands(mask.grid, mask.marked[k], mask.times[k]);
}

LocalUpdateResult local_update(const SystemModel& model, const ValueSeries& v_hat, const LeakingMask& mask,
                               const SolverConfig& config, double frontier_threshold) {
  if (!(v_hat.grid == mask.grid) || v_hat.times != mask.times)
    throw DomainError("approximated series and mask are not aligned");
  if (mask.count(0) != 0) throw DomainError("mask marks the terminal time; terminal values are exact");
  const Grid& grid = v_hat.grid;
  const Index total = grid.size();
  SolverConfig cfg = config;
  cfg.horizon = v_hat.times.back();
  const LaxFriedrichs scheme(model, grid, cfg);
  auto ws = scheme.make_workspace();

  LocalUpdateResult out;
  out.corrected.grid = grid;
  out.corrected.times = v_hat.times;
  out.corrected.slices.reserve(v_hat.slices.size());
  out.corrected.slices.push_back(v_hat.slices[0]);
  out.updates_per_step.assign(v_hat.times.size(), 0);
  out.touched.assign(v_hat.times.size(), {});
  out.touched[0].assign(total, 0);

  std::vector<std::uint8_t> visited(total), queued(total);
  std::vector<Index> frontier, next_frontier;
  for (Index k = 0; k + 1 < v_hat.times.size(); ++k) {
    const auto& current = out.corrected.slices[k];
    const auto& approx = v_hat.slices[k + 1];
    const auto& detected = mask.marked[k + 1];
    std::vector<double> next = approx;
    std::fill(visited.begin(), visited.end(), 0);
    Index updates = 0;

    auto update_value = [&](Index z, std::vector<Index>& into) {
      next[z] = scheme.update_point(current, z, ws);
      ++updates;
      if (std::abs(next[z] - approx[z]) > frontier_threshold) {
        grid.for_each_neighbor(z, [&](Index nb) {
          if (!queued[nb]) {
            queued[nb] = 1;
            into.push_back(nb);
          }
        });
      }
    };
    auto drain = [&](std::vector<Index>& set) {
      // set \ visited, clearing the queued flags
      std::erase_if(set, [&](Index z) {
        queued[z] = 0;
        return visited[z] != 0;
      });
    };

    frontier.clear();
    for (Index z = 0; z < total; ++z)
      if (detected[z]) update_value(z, frontier);
    for (Index z = 0; z < total; ++z)
      if (detected[z]) visited[z] = 1;
    drain(frontier);
    while (!frontier.empty()) {
      next_frontier.clear();
      for (Index z : frontier) update_value(z, next_frontier);
      for (Index z : frontier) visited[z] = 1;
      drain(next_frontier);
      std::swap(frontier, next_frontier);
      if (updates > total) throw std::logic_error("local update frontier exceeded the grid size");
    }

    for (double v : next)
      if (!std::isfinite(v)) throw NumericalError("non-finite value produced by the local update");
    out.updates_per_step[k + 1] = updates;
    out.touched[k + 1] = visited;
    out.corrected.slices.push_back(std::move(next));
  }
  return out;
}

Comparison compare_slices(std::span<const double> a, std::span<const double> b, double threshold) {
  if (a.size() != b.size()) throw DomainError("compared slices differ in size");
  Comparison c;
  double sum = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (d > threshold) ++c.mismatches;
    sum += d;
    c.max_abs_diff = std::max(c.max_abs_diff, d);
  }
  c.avg_abs_diff = a.empty() ? 0.0 : sum / static_cast<double>(a.size());
  return c;
}

Comparison compare(const ValueSeries& a, const ValueSeries& b, double threshold) {
  if (!(a.grid == b.grid)) throw DomainError("compared series live on different grids");
  if (a.times.size() != b.times.size()) throw DomainError("compared series have different time stamps");
  for (Index k = 0; k < a.times.size(); ++k)
    if (std::abs(a.times[k] - b.times[k]) > 1e-9) throw DomainError("compared series have different time stamps");
  if (a.slices.empty()) throw DomainError("compared series are empty");
  return compare_slices(a.final_slice(), b.final_slice(), threshold);
}

}  // namespace hjleak
