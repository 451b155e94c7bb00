#include "hjleak/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "hjleak/errors.hpp"

namespace hjleak {

std::string to_string(Combo combo) { return combo == Combo::Intersection ? "intersection" : "union"; }

Combo combo_from_string(const std::string& s) {
  if (s == "intersection") return Combo::Intersection;
  if (s == "union") return Combo::Union;
  throw ConfigError("combo must be 'intersection' or 'union', got '" + s + "'");
}

LiftedSeries::LiftedSeries(const ValueSeries& sub, const Grid& full, std::vector<Index> dims)
    : sub_(&sub), full_(full), proj_(full, std::move(dims)) {
  if (!(proj_.sub_grid() == sub.grid)) throw DomainError("subsystem series grid is not a restriction of the full grid");
}

std::vector<double> LiftedSeries::slice(Index k) const {
  std::vector<double> out(full_.size());
  const auto& src = sub_->slices.at(k);
  proj_.for_each(0, out.size(), [&](Index i, Index j) { out[i] = src[j]; });
  return out;
}

SolverConfig restrict_config(const SolverConfig& config, const std::vector<Index>& dims) {
  SolverConfig out = config;
  if (!config.dissipation.empty()) {
    out.dissipation.clear();
    for (Index d : dims) out.dissipation.push_back(config.dissipation.at(d));
  }
  return out;
}

void check_terminal_consistency(const SystemModel& model, const Grid& grid, const DecomposedTargets& targets,
                                Combo combo, double tol) {
  if (!targets.full) return;
  const Projection p1(grid, model.schema.subsystem_dims(1)), p2(grid, model.schema.subsystem_dims(2));
  const auto l1 = targets.sub1.evaluate(p1.sub_grid()), l2 = targets.sub2.evaluate(p2.sub_grid());
  const auto lf = targets.full->evaluate(grid);
  Index bad = grid.size();
  Projection::for_each_pair(p1, p2, 0, grid.size(), [&](Index i, Index j1, Index j2) {
    const double combined = combo == Combo::Intersection ? std::max(l1[j1], l2[j2]) : std::min(l1[j1], l2[j2]);
    if (bad == grid.size() && std::abs(combined - lf[i]) > tol * std::max(1.0, std::abs(lf[i]))) bad = i;
  });
  if (bad != grid.size())
    throw ConfigError("terminal costs are inconsistent: the " + to_string(combo) +
                      " of the subsystem costs does not reproduce the full cost at grid point " + std::to_string(bad));
}

namespace {

template <typename A, typename B>
void run_pair(unsigned workers, A&& a, B&& b) {
  if (workers > 1) {
    std::exception_ptr err;
    {
      std::jthread t([&] {
        try {
          a();
        } catch (...) {
          err = std::current_exception();
        }
      });
      b();
    }
    if (err) std::rethrow_exception(err);
  } else {
    a();
    b();
  }
}

void check_decomposable(const SystemModel& model, const Grid& grid, const DecomposedTargets& targets) {
  if (!model.has_schema()) throw ConfigError("model '" + model.name + "' declares no partition schema");
  check_self_contained(model, 1, grid);
  check_self_contained(model, 2, grid);
  if (targets.sub1.required_dims() > model.schema.subsystem_dims(1).size() ||
      targets.sub2.required_dims() > model.schema.subsystem_dims(2).size())
    throw ConfigError("subsystem target references a dimension outside its subsystem");
}

}  // namespace

SubValuePair solve_decomposed(const SystemModel& model, const Grid& grid, const DecomposedTargets& targets,
                              ReconstructionMode mode, const SolverConfig& config) {
  check_decomposable(model, grid, targets);
  check_terminal_consistency(model, grid, targets, mode.combo);
  SolverConfig cfg = config;
  cfg.mode = mode.problem;

  const SubsystemModel s1 = restrict_to_subsystem(model, 1, {});
  const SubsystemModel s2 = restrict_to_subsystem(model, 2, {});
  SubValuePair pair;
  pair.full_grid = grid;
  pair.dims1 = s1.state_dims;
  pair.dims2 = s2.state_dims;
  run_pair(
      config.workers, [&] { pair.sub1 = solve_hjb(s1, grid, targets.sub1, restrict_config(cfg, s1.state_dims)); },
      [&] { pair.sub2 = solve_hjb(s2, grid, targets.sub2, restrict_config(cfg, s2.state_dims)); });
  return pair;
}

ValueSeries reconstruct(const SubValuePair& pair, ReconstructionMode mode) {
  if (pair.sub1.times != pair.sub2.times) throw DomainError("subsystem series are not time-aligned");
  const LiftedSeries l1 = pair.lifted1(), l2 = pair.lifted2();
  ValueSeries out;
  out.grid = pair.full_grid;
  out.times = pair.sub1.times;
  out.slices.resize(out.times.size());
  for (Index k = 0; k < out.times.size(); ++k) {
    auto& s = out.slices[k];
    s.resize(out.grid.size());
    const auto& a = pair.sub1.slices[k];
    const auto& b = pair.sub2.slices[k];
    if (mode.combo == Combo::Intersection)
      Projection::for_each_pair(l1.projection(), l2.projection(), 0, s.size(),
                                [&](Index i, Index j1, Index j2) { s[i] = std::max(a[j1], b[j2]); });
    else
      Projection::for_each_pair(l1.projection(), l2.projection(), 0, s.size(),
                                [&](Index i, Index j1, Index j2) { s[i] = std::min(a[j1], b[j2]); });
  }
  return out;
}

RestrictedSubvalues solve_restricted_subvalues(const SystemModel& model, const Grid& grid,
                                               const DecomposedTargets& targets, ReconstructionMode mode,
                                               const SolverConfig& config) {
  // Same model and targets as solve_decomposed, which already checked them;
  // only the cheap structural checks are repeated here.
  if (!model.has_schema()) throw ConfigError("model '" + model.name + "' declares no partition schema");
  if (!model.schema.uc_idx.empty())
    throw ConfigError("automatic leaking threshold is unsupported for models with shared controls; "
                      "supply a manual per-time threshold");
  SolverConfig cfg = config;
  cfg.mode = mode.problem;
  const SubsystemModel r1 = restrict_to_subsystem(model, 1, model.schema.u1_idx);
  const SubsystemModel r2 = restrict_to_subsystem(model, 2, model.schema.u2_idx);
  RestrictedSubvalues out;
  run_pair(
      config.workers, [&] { out.first = solve_hjb(r1, grid, targets.sub1, restrict_config(cfg, r1.state_dims)); },
      [&] { out.second = solve_hjb(r2, grid, targets.sub2, restrict_config(cfg, r2.state_dims)); });
  return out;
}

}  // namespace hjleak
