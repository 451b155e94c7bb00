#include "hjleak/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hjleak/errors.hpp"
#include "parallel.hpp"

namespace hjleak {

std::string to_string(Mode mode) { return mode == Mode::Reach ? "reach" : "avoid"; }

Mode mode_from_string(const std::string& s) {
  if (s == "reach") return Mode::Reach;
  if (s == "avoid") return Mode::Avoid;
  throw ConfigError("mode must be 'reach' or 'avoid', got '" + s + "'");
}

namespace {

// Extremum of q'u over the constraint blocks. Writes the attaining control
// into u_star when it is nonempty.
double control_term(const SystemModel& model, std::span<const double> q, Mode mode, std::span<double> u_star) {
  const double sign = mode == Mode::Reach ? -1.0 : 1.0;
  double total = 0.0;
  for (const auto& b : model.constraints) {
    const Index nb = b.indices.size();
    const double conj = holder_conjugate(b.beta);
    double dual = 0.0;
    if (std::isinf(conj)) {
      for (Index k = 0; k < nb; ++k) dual = std::max(dual, std::abs(q[b.indices[k]] / b.alpha[k]));
    } else if (conj == 1.0) {
      for (Index k = 0; k < nb; ++k) dual += std::abs(q[b.indices[k]] / b.alpha[k]);
    } else if (conj == 2.0) {
      for (Index k = 0; k < nb; ++k) {
        const double r = q[b.indices[k]] / b.alpha[k];
        dual += r * r;
      }
      dual = std::sqrt(dual);
    } else {
      for (Index k = 0; k < nb; ++k) dual += std::pow(std::abs(q[b.indices[k]] / b.alpha[k]), conj);
      dual = std::pow(dual, 1.0 / conj);
    }
    total += sign * b.ubar * dual;

    if (u_star.empty()) continue;
    for (Index k = 0; k < nb; ++k) u_star[b.indices[k]] = 0.0;
    if (dual == 0.0) continue;
    // maximizer v of r'v over ||v||_beta <= ubar, then u = v / alpha; reach flips sign
    if (std::isinf(b.beta)) {
      for (Index k = 0; k < nb; ++k) {
        const double r = q[b.indices[k]] / b.alpha[k];
        const double v = r > 0.0 ? b.ubar : (r < 0.0 ? -b.ubar : 0.0);
        u_star[b.indices[k]] = sign * v / b.alpha[k];
      }
    } else if (b.beta == 1.0) {
      Index best = 0;
      for (Index k = 1; k < nb; ++k)
        if (std::abs(q[b.indices[k]] / b.alpha[k]) > std::abs(q[b.indices[best]] / b.alpha[best])) best = k;
      const double r = q[b.indices[best]] / b.alpha[best];
      u_star[b.indices[best]] = sign * (r > 0.0 ? b.ubar : -b.ubar) / b.alpha[best];
    } else {
      for (Index k = 0; k < nb; ++k) {
        const double r = q[b.indices[k]] / b.alpha[k];
        const double mag = std::pow(std::abs(r), conj - 1.0) / std::pow(dual, conj - 1.0);
        u_star[b.indices[k]] = sign * std::copysign(b.ubar * mag, r) / b.alpha[k];
      }
    }
  }
  return total;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double out = 0.0;
  for (Index i = 0; i < a.size(); ++i) out += a[i] * b[i];
  return out;
}

// q = G' p for row-major G (n x m).
void transpose_times(std::span<const double> g, std::span<const double> p, Index n, Index m, std::span<double> q) {
  std::fill(q.begin(), q.end(), 0.0);
  for (Index d = 0; d < n; ++d) {
    const double pd = p[d];
    if (pd == 0.0) continue;
    for (Index j = 0; j < m; ++j) q[j] += g[d * m + j] * pd;
  }
}

}  // namespace

HamiltonianResult hamiltonian_extremum(const SystemModel& model, std::span<const double> z,
                                       std::span<const double> p, Mode mode) {
  if (p.size() != model.n || z.size() != model.n) throw DomainError("state/costate length does not match model");
  const auto f = model.eval_drift(z);
  const auto g = model.eval_control_matrix(z);
  std::vector<double> q(model.m);
  transpose_times(g, p, model.n, model.m, q);
  HamiltonianResult out;
  out.u_star.assign(model.m, 0.0);
  out.value = dot(p, f) + control_term(model, q, mode, out.u_star);
  return out;
}

void SolverConfig::validate() const {
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  if (!(horizon <= 0.0)) throw ConfigError("horizon must be <= 0");
  const double k = -horizon / delta;
  if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k))
    throw ConfigError("horizon must be an integer multiple of -delta");
  for (double s : dissipation)
    if (!(s >= 0.0)) throw ConfigError("dissipation coefficients must be nonnegative");
}

Index SolverConfig::steps() const { return static_cast<Index>(std::llround(-horizon / delta)); }

Index ValueSeries::time_index(double t) const {
  for (Index k = 0; k < times.size(); ++k)
    if (std::abs(times[k] - t) <= 1e-9) return k;
  std::ostringstream msg;
  msg << "time " << t << " is not a stored time stamp";
  throw DomainError(msg.str());
}

LaxFriedrichs::LaxFriedrichs(const SystemModel& model, const Grid& grid, const SolverConfig& config)
    : model_(model), grid_(grid), config_(config) {
  config_.validate();
  if (grid.dims() != model.n) throw ConfigError("grid dimension does not match model '" + model.name + "'");
  if (!config_.dissipation.empty() && config_.dissipation.size() != model.n)
    throw ConfigError("manual dissipation needs one coefficient per state dimension");

  // |dH/dp_d| <= |f_d| + sum_j |G_dj| * max|u_j|
  const DynamicsBounds bounds = dynamics_bounds(model, grid);
  const auto umax = model.control_max();
  speed_.assign(model.n, 0.0);
  for (Index d = 0; d < model.n; ++d) {
    speed_[d] = bounds.drift[d];
    for (Index j = 0; j < model.m; ++j) speed_[d] += bounds.control[d * model.m + j] * umax[j];
  }
  sigma_ = config_.auto_dissipation() ? speed_ : config_.dissipation;

  double rate = 0.0;
  for (Index d = 0; d < model.n; ++d) rate += std::max(sigma_[d], speed_[d]) / grid.spacings()[d];
  cfl_ = config_.delta * rate;
  if (cfl_ > 1.0 + 1e-12) {
    const double max_delta = 1.0 / rate;
    std::ostringstream msg;
    msg << "CFL condition violated for model '" << model.name << "': CFL number " << cfl_ << " > 1 at delta "
        << config_.delta << "; largest admissible delta is " << max_delta
        << " (reduce delta or coarsen the grid)";
    throw CflError(msg.str(), cfl_, max_delta);
  }
}

LaxFriedrichs::Workspace LaxFriedrichs::make_workspace() const {
  Workspace ws;
  ws.z.resize(model_.n);
  ws.f.resize(model_.n);
  ws.g.resize(model_.n * model_.m);
  ws.p.resize(model_.n);
  ws.q.resize(model_.m);
  ws.multi.resize(model_.n);
  return ws;
}

double LaxFriedrichs::update_point(std::span<const double> slice, Index linear, Workspace& ws) const {
  grid_.multi(linear, ws.multi);
  return update_with_multi(slice, linear, ws);
}

double LaxFriedrichs::update_with_multi(std::span<const double> slice, Index linear, Workspace& ws) const {
  const auto& strides = grid_.strides();
  const auto& counts = grid_.counts();
  const auto& h = grid_.spacings();
  const double c = slice[linear];
  double diss = 0.0;
  for (Index d = 0; d < model_.n; ++d) {
    const Index i = ws.multi[d];
    const Index s = strides[d];
    double dm, dp;
    if (i == 0) {
      dp = (slice[linear + s] - c) / h[d];
      dm = dp;
    } else if (i + 1 == counts[d]) {
      dm = (c - slice[linear - s]) / h[d];
      dp = dm;
    } else {
      dm = (c - slice[linear - s]) / h[d];
      dp = (slice[linear + s] - c) / h[d];
    }
    ws.p[d] = 0.5 * (dm + dp);
    diss += sigma_[d] * 0.5 * (dp - dm);
    ws.z[d] = grid_.coordinate(d, i);
  }
  model_.drift(ws.z, ws.f);
  double ham = dot(ws.p, ws.f);
  if (model_.m > 0) {
    model_.control_matrix(ws.z, ws.g);
    transpose_times(ws.g, ws.p, model_.n, model_.m, ws.q);
    ham += control_term(model_, ws.q, config_.mode, {});
  }
  return c + config_.delta * (ham + diss);
}

std::vector<double> LaxFriedrichs::step(std::span<const double> slice) const {
  if (slice.size() != grid_.size()) throw DomainError("slice length does not match grid");
  std::vector<double> out(slice.size());
  detail::parallel_for(grid_.size(), config_.workers, [&](Index begin, Index end, unsigned) {
    if (begin >= end) return;
    Workspace ws = make_workspace();
    grid_.multi(begin, ws.multi);
    for (Index l = begin; l < end; ++l) {
      out[l] = update_with_multi(slice, l, ws);
      for (Index d = model_.n; d-- > 0;) {
        if (++ws.multi[d] < grid_.counts()[d]) break;
        ws.multi[d] = 0;
      }
    }
  });
  for (double v : out)
    if (!std::isfinite(v)) throw NumericalError("non-finite value produced by the solver step");
  return out;
}

std::vector<double> lax_friedrichs_step(const SystemModel& model, const Grid& grid, std::span<const double> slice,
                                        const SolverConfig& config) {
  return LaxFriedrichs(model, grid, config).step(slice);
}

ValueSeries solve_hjb(const SystemModel& model, const Grid& grid, const TargetSpec& target,
                      const SolverConfig& config) {
  const LaxFriedrichs scheme(model, grid, config);
  ValueSeries out;
  out.grid = grid;
  out.times.push_back(0.0);
  out.slices.push_back(target.evaluate(grid));
  for (double v : out.slices[0])
    if (!std::isfinite(v)) throw NumericalError("terminal cost is not finite on the grid");
  for (Index k = 1; k <= config.steps(); ++k) {
    out.slices.push_back(scheme.step(out.slices.back()));
    out.times.push_back(-static_cast<double>(k) * config.delta);
  }
  return out;
}

ValueSeries solve_hjb(const SubsystemModel& model, const Grid& full_grid, const TargetSpec& target,
                      const SolverConfig& config) {
  return solve_hjb(model.reduced, full_grid.restrict_to(model.state_dims), target, config);
}

namespace {

// Node-centered gradient (one-sided at the boundary).
void node_gradient(const Grid& grid, std::span<const double> slice, std::span<const Index> multi,
                   std::span<double> out) {
  Index linear = 0;
  for (Index d = 0; d < grid.dims(); ++d) linear += multi[d] * grid.strides()[d];
  for (Index d = 0; d < grid.dims(); ++d) {
    const Index i = multi[d], s = grid.strides()[d];
    const double h = grid.spacings()[d];
    if (i == 0)
      out[d] = (slice[linear + s] - slice[linear]) / h;
    else if (i + 1 == grid.counts()[d])
      out[d] = (slice[linear] - slice[linear - s]) / h;
    else
      out[d] = (slice[linear + s] - slice[linear - s]) / (2.0 * h);
  }
}

std::vector<double> interpolate_slice_gradient(const Grid& grid, std::span<const double> slice,
                                               std::span<const double> z) {
  const Index n = grid.dims();
  std::vector<Index> base(n), corner(n);
  std::vector<double> frac(n), grad(n, 0.0), g(n);
  for (Index d = 0; d < n; ++d) {
    const double u = (z[d] - grid.mins()[d]) / grid.spacings()[d];
    const double i0 = std::clamp(std::floor(u), 0.0, static_cast<double>(grid.counts()[d] - 2));
    base[d] = static_cast<Index>(i0);
    frac[d] = std::clamp(u - i0, 0.0, 1.0);
  }
  for (Index mask = 0; mask < (Index{1} << n); ++mask) {
    double w = 1.0;
    for (Index d = 0; d < n; ++d) {
      const bool up = (mask >> d) & 1U;
      corner[d] = base[d] + (up ? 1 : 0);
      w *= up ? frac[d] : 1.0 - frac[d];
    }
    if (w == 0.0) continue;
    node_gradient(grid, slice, corner, g);
    for (Index d = 0; d < n; ++d) grad[d] += w * g[d];
  }
  return grad;
}

}  // namespace

std::vector<double> interpolate_gradient(const ValueSeries& series, std::span<const double> z, double t) {
  if (!series.grid.contains(z)) throw DomainError("query state outside the grid bounds");
  if (series.times.empty()) throw DomainError("empty value series");
  if (t > 1e-12 || t < series.times.back() - 1e-12) throw DomainError("query time outside the series range");
  Index k = 0;
  while (k + 1 < series.times.size() && series.times[k + 1] >= t) ++k;
  auto grad = interpolate_slice_gradient(series.grid, series.slices[k], z);
  if (k + 1 < series.times.size() && series.times[k] > t) {
    const double w = (series.times[k] - t) / (series.times[k] - series.times[k + 1]);
    const auto next = interpolate_slice_gradient(series.grid, series.slices[k + 1], z);
    for (Index d = 0; d < grad.size(); ++d) grad[d] = (1.0 - w) * grad[d] + w * next[d];
  }
  return grad;
}

std::vector<double> extract_optimal_control(const SystemModel& model, const ValueSeries& series,
                                            std::span<const double> z, double t, Mode mode) {
  const auto p = interpolate_gradient(series, z, t);
  return hamiltonian_extremum(model, z, p, mode).u_star;
}

}  // namespace hjleak
