#include "hjleak/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hjleak/errors.hpp"

namespace hjleak {

void ControlConstraintBlock::validate() const {
  if (indices.empty()) throw ConfigError("constraint block has no control indices");
  if (alpha.size() != indices.size()) throw ConfigError("constraint block alpha/indices length mismatch");
  if (!(beta >= 1.0)) throw ConfigError("constraint block needs beta >= 1");
  if (!(ubar >= 0.0)) throw ConfigError("constraint block needs ubar >= 0");
  for (double a : alpha)
    if (!(a > 0.0)) throw ConfigError("constraint block weights must be positive");
}

double holder_conjugate(double beta) {
  if (std::isinf(beta)) return 1.0;
  if (beta == 1.0) return kInfNorm;
  return beta / (beta - 1.0);
}

double weighted_norm(std::span<const double> v, std::span<const double> alpha, double beta) {
  if (std::isinf(beta)) {
    double out = 0.0;
    for (Index k = 0; k < v.size(); ++k) out = std::max(out, std::abs(alpha[k] * v[k]));
    return out;
  }
  if (beta == 1.0) {
    double out = 0.0;
    for (Index k = 0; k < v.size(); ++k) out += std::abs(alpha[k] * v[k]);
    return out;
  }
  if (beta == 2.0) {
    double out = 0.0;
    for (Index k = 0; k < v.size(); ++k) out += (alpha[k] * v[k]) * (alpha[k] * v[k]);
    return std::sqrt(out);
  }
  double out = 0.0;
  for (Index k = 0; k < v.size(); ++k) out += std::pow(std::abs(alpha[k] * v[k]), beta);
  return std::pow(out, 1.0 / beta);
}

void SystemModel::validate() const {
  if (n == 0) throw ConfigError("model '" + name + "' has zero state dimension");
  if (!drift || !control_matrix) throw ConfigError("model '" + name + "' is missing dynamics callbacks");
  std::vector<int> seen(m, 0);
  for (const auto& b : constraints) {
    b.validate();
    for (Index j : b.indices) {
      if (j >= m) throw ConfigError("constraint block references control " + std::to_string(j) + " >= m");
      ++seen[j];
    }
  }
  for (Index j = 0; j < m; ++j)
    if (seen[j] != 1) throw ConfigError("control " + std::to_string(j) + " must appear in exactly one constraint block");
  if (has_schema()) schema.validate(n, m);
}

std::vector<double> SystemModel::eval_drift(std::span<const double> z) const {
  std::vector<double> out(n, 0.0);
  drift(z, out);
  return out;
}

std::vector<double> SystemModel::eval_control_matrix(std::span<const double> z) const {
  std::vector<double> out(n * m, 0.0);
  if (m > 0) control_matrix(z, out);
  return out;
}

std::vector<double> SystemModel::control_max() const {
  std::vector<double> out(m, 0.0);
  for (const auto& b : constraints)
    for (Index k = 0; k < b.indices.size(); ++k) out[b.indices[k]] = b.component_max(k);
  return out;
}

SystemModel make_single_integrator_2d(double ubar) {
  if (!(ubar > 0.0)) throw ConfigError("single_integrator_2d needs ubar > 0");
  SystemModel model;
  model.name = "single_integrator_2d";
  model.n = 2;
  model.m = 2;
  model.drift = [](std::span<const double>, std::span<double> out) { out[0] = out[1] = 0.0; };
  model.control_matrix = [](std::span<const double>, std::span<double> g) {
    g[0] = 1.0;
    g[1] = 0.0;
    g[2] = 0.0;
    g[3] = 1.0;
  };
  model.constraints = {ControlConstraintBlock{{0, 1}, {1.0, 1.0}, 2.0, ubar}};
  model.schema = PartitionSchema{{0}, {1}, {}, {0}, {1}, {}};
  model.bounds = [](std::span<const double>, std::span<const double>) {
    return DynamicsBounds{{0.0, 0.0}, {1.0, 0.0, 0.0, 1.0}};
  };
  return model;
}

namespace {

double max_abs_over(std::span<const double> mins, std::span<const double> maxs, Index d) {
  return std::max(std::abs(mins[d]), std::abs(maxs[d]));
}

// max |sin| or |cos| over [lo, hi]: endpoints plus interior extrema.
double max_abs_trig(double lo, double hi, bool use_cos) {
  auto f = [&](double x) { return std::abs(use_cos ? std::cos(x) : std::sin(x)); };
  double out = std::max(f(lo), f(hi));
  const double offset = use_cos ? 0.0 : std::numbers::pi / 2.0;
  const double k0 = std::ceil((lo - offset) / std::numbers::pi);
  if (offset + k0 * std::numbers::pi <= hi) out = 1.0;
  return out;
}

}  // namespace

SystemModel make_planar_quadrotor_6d(double ubar_thrust, double ubar_torque, double gravity) {
  if (!(ubar_thrust > 0.0) || !(ubar_torque > 0.0))
    throw ConfigError("planar_quadrotor_6d needs positive control bounds");
  SystemModel model;
  model.name = "planar_quadrotor_6d";
  model.n = 6;
  model.m = 2;
  // state (x, y, vx, vy, theta, omega), control (thrust, torque)
  model.drift = [gravity](std::span<const double> z, std::span<double> out) {
    out[0] = z[2];
    out[1] = z[3];
    out[2] = 0.0;
    out[3] = -gravity;
    out[4] = z[5];
    out[5] = 0.0;
  };
  model.control_matrix = [](std::span<const double> z, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
    g[2 * 2 + 0] = -std::sin(z[4]);
    g[3 * 2 + 0] = std::cos(z[4]);
    g[5 * 2 + 1] = 1.0;
  };
  model.constraints = {ControlConstraintBlock{{0}, {1.0}, kInfNorm, ubar_thrust},
                       ControlConstraintBlock{{1}, {1.0}, kInfNorm, ubar_torque}};
  model.schema = PartitionSchema{{0, 2}, {1, 3}, {4, 5}, {}, {}, {0, 1}};
  model.bounds = [gravity](std::span<const double> lo, std::span<const double> hi) {
    DynamicsBounds b{std::vector<double>(6, 0.0), std::vector<double>(12, 0.0)};
    b.drift[0] = max_abs_over(lo, hi, 2);
    b.drift[1] = max_abs_over(lo, hi, 3);
    b.drift[3] = std::abs(gravity);
    b.drift[4] = max_abs_over(lo, hi, 5);
    b.control[2 * 2 + 0] = max_abs_trig(lo[4], hi[4], false);
    b.control[3 * 2 + 0] = max_abs_trig(lo[4], hi[4], true);
    b.control[5 * 2 + 1] = 1.0;
    return b;
  };
  return model;
}

SubsystemModel restrict_to_subsystem(const SystemModel& model, int which, const std::vector<Index>& zero_controls) {
  if (!model.has_schema()) throw ConfigError("model '" + model.name + "' declares no partition schema");
  if (which != 1 && which != 2) throw DomainError("subsystem must be 1 or 2");
  SubsystemModel sub;
  sub.parent = std::make_shared<const SystemModel>(model);
  sub.which = which;
  sub.state_dims = model.schema.subsystem_dims(which);
  const auto own_controls = model.schema.subsystem_controls(which);
  for (Index j : zero_controls)
    if (std::find(own_controls.begin(), own_controls.end(), j) == own_controls.end())
      throw DomainError("control " + std::to_string(j) + " is not a control of subsystem " + std::to_string(which));
  for (Index j : own_controls) {
    if (std::find(zero_controls.begin(), zero_controls.end(), j) != zero_controls.end())
      sub.restricted_controls.push_back(j);
    else
      sub.control_idx.push_back(j);
  }

  SystemModel& r = sub.reduced;
  r.name = model.name + "/sub" + std::to_string(which) + (sub.restricted_controls.empty() ? "" : "/restricted");
  r.n = sub.state_dims.size();
  r.m = sub.control_idx.size();

  // Constraint blocks keep their weights and bound; indices become positions in control_idx.
  for (const auto& block : model.constraints) {
    ControlConstraintBlock kept{{}, {}, block.beta, block.ubar};
    for (Index k = 0; k < block.indices.size(); ++k) {
      auto it = std::find(sub.control_idx.begin(), sub.control_idx.end(), block.indices[k]);
      if (it == sub.control_idx.end()) continue;
      kept.indices.push_back(static_cast<Index>(it - sub.control_idx.begin()));
      kept.alpha.push_back(block.alpha[k]);
    }
    if (!kept.indices.empty()) r.constraints.push_back(std::move(kept));
  }

  const auto parent = sub.parent;
  const auto dims = sub.state_dims;
  const auto ctrl = sub.control_idx;
  auto embed = [parent, dims](std::span<const double> x) {
    std::vector<double> z(parent->n, 0.0);
    for (Index k = 0; k < dims.size(); ++k) z[dims[k]] = x[k];
    return z;
  };
  r.drift = [parent, dims, embed](std::span<const double> x, std::span<double> out) {
    const auto z = embed(x);
    std::vector<double> f(parent->n);
    parent->drift(z, f);
    for (Index k = 0; k < dims.size(); ++k) out[k] = f[dims[k]];
  };
  r.control_matrix = [parent, dims, ctrl, embed](std::span<const double> x, std::span<double> out) {
    const auto z = embed(x);
    std::vector<double> g(parent->n * parent->m);
    parent->control_matrix(z, g);
    for (Index k = 0; k < dims.size(); ++k)
      for (Index c = 0; c < ctrl.size(); ++c) out[k * ctrl.size() + c] = g[dims[k] * parent->m + ctrl[c]];
  };
  if (model.bounds) {
    r.bounds = [parent, dims, ctrl](std::span<const double> lo, std::span<const double> hi) {
      std::vector<double> flo(parent->n, 0.0), fhi(parent->n, 0.0);
      for (Index k = 0; k < dims.size(); ++k) {
        flo[dims[k]] = lo[k];
        fhi[dims[k]] = hi[k];
      }
      const DynamicsBounds full = parent->bounds(flo, fhi);
      DynamicsBounds b{std::vector<double>(dims.size()), std::vector<double>(dims.size() * ctrl.size())};
      for (Index k = 0; k < dims.size(); ++k) {
        b.drift[k] = full.drift[dims[k]];
        for (Index c = 0; c < ctrl.size(); ++c) b.control[k * ctrl.size() + c] = full.control[dims[k] * parent->m + ctrl[c]];
      }
      return b;
    };
  }
  return sub;
}

double joint_constraint_eval(const SystemModel& model, std::span<const double> u) {
  if (u.size() != model.m) throw DomainError("control vector has wrong length");
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<double> block_u;
  for (const auto& b : model.constraints) {
    block_u.clear();
    for (Index j : b.indices) block_u.push_back(u[j]);
    worst = std::max(worst, weighted_norm(block_u, b.alpha, b.beta) - b.ubar);
  }
  return model.constraints.empty() ? 0.0 : worst;
}

void check_self_contained(const SystemModel& model, int which, const Grid& grid, int samples) {
  if (!model.has_schema()) throw ConfigError("model '" + model.name + "' declares no partition schema");
  if (grid.dims() != model.n) throw ConfigError("grid dimension does not match model state dimension");
  const auto dims = model.schema.subsystem_dims(which);
  const auto& other = model.schema.exclusive_dims(which == 1 ? 2 : 1);
  const auto& other_u = model.schema.exclusive_controls(which == 1 ? 2 : 1);

  std::mt19937_64 rng(0x5eedULL + static_cast<unsigned>(which));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> z(model.n), z2(model.n), f1(model.n), f2(model.n), g1(model.n * model.m),
      g2(model.n * model.m);
  for (int s = 0; s < samples; ++s) {
    for (Index d = 0; d < model.n; ++d) z[d] = grid.mins()[d] + (grid.maxs()[d] - grid.mins()[d]) * unit(rng);
    z2 = z;
    for (Index d : other) z2[d] = grid.mins()[d] + (grid.maxs()[d] - grid.mins()[d]) * unit(rng);
    model.drift(z, f1);
    model.drift(z2, f2);
    if (model.m > 0) {
      model.control_matrix(z, g1);
      model.control_matrix(z2, g2);
    }
    for (Index d : dims) {
      if (f1[d] != f2[d])
        throw DecompositionError("drift of state " + std::to_string(d) + " depends on the other subsystem's state");
      for (Index j = 0; j < model.m; ++j) {
        if (g1[d * model.m + j] != g2[d * model.m + j])
          throw DecompositionError("control column " + std::to_string(j) + " of state " + std::to_string(d) +
                                   " depends on the other subsystem's state");
      }
      for (Index j : other_u)
        if (g1[d * model.m + j] != 0.0)
          throw DecompositionError("control " + std::to_string(j) + " of the other subsystem drives state " +
                                   std::to_string(d));
    }
  }
}

DynamicsBounds dynamics_bounds(const SystemModel& model, const Grid& grid) {
  if (model.bounds) return model.bounds(grid.mins(), grid.maxs());
  DynamicsBounds b{std::vector<double>(model.n, 0.0), std::vector<double>(model.n * model.m, 0.0)};
  std::vector<double> z(model.n), f(model.n), g(model.n * model.m);
  for (Index i = 0; i < grid.size(); ++i) {
    grid.state_at(i, z);
    model.drift(z, f);
    if (model.m > 0) model.control_matrix(z, g);
    for (Index d = 0; d < model.n; ++d) b.drift[d] = std::max(b.drift[d], std::abs(f[d]));
    for (Index k = 0; k < g.size(); ++k) b.control[k] = std::max(b.control[k], std::abs(g[k]));
  }
  return b;
}

}  // namespace hjleak
