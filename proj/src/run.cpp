#include "hjleak/run.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hjleak/errors.hpp"

namespace hjleak {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("field '" + field + "': " + what);
}

template <class T>
T get_field(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) field_error(path + key, "missing");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    field_error(path + key, std::string("wrong type (") + e.what() + ")");
  }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& path) {
  return j.contains(key) ? get_field<T>(j, key, path) : fallback;
}

TargetSpec parse_target(const json& j, const std::string& path) {
  if (!j.is_object()) field_error(path, "expected an object");
  const auto type = get_field<std::string>(j, "type", path + ".");
  if (type == "axis") {
    return TargetSpec::axis(get_field<Index>(j, "dim", path + "."), get_or(j, "abs", false, path + "."),
                            get_or(j, "scale", 1.0, path + "."), get_or(j, "offset", 0.0, path + "."));
  }
  if (type == "box") {
    return TargetSpec::box(get_field<std::vector<double>>(j, "lo", path + "."),
                           get_field<std::vector<double>>(j, "hi", path + "."));
  }
  if (type == "max" || type == "min") {
    if (!j.contains("parts") || !j["parts"].is_array() || j["parts"].empty())
      field_error(path + ".parts", "expected a nonempty array");
    std::vector<TargetSpec> parts;
    for (Index i = 0; i < j["parts"].size(); ++i)
      parts.push_back(parse_target(j["parts"][i], path + ".parts[" + std::to_string(i) + "]"));
    return type == "max" ? TargetSpec::max_of(std::move(parts)) : TargetSpec::min_of(std::move(parts));
  }
  field_error(path + ".type", "unknown target type '" + type + "'");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

LeakingMask empty_mask(const ValueSeries& v) {
  LeakingMask m;
  m.grid = v.grid;
  m.times = v.times;
  m.marked.assign(v.times.size(), std::vector<std::uint8_t>(v.grid.size(), 0));
  m.delta_used.assign(v.times.size(), 0.0);
  return m;
}

}  // namespace

SystemModel RunConfig::build_model() const {
  auto param = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  std::set<std::string> allowed;
  SystemModel m;
  if (model == "single_integrator_2d") {
    allowed = {"ubar"};
    m = make_single_integrator_2d(param("ubar", 1.0));
  } else if (model == "planar_quadrotor_6d") {
    allowed = {"ubar_thrust", "ubar_torque", "gravity"};
    m = make_planar_quadrotor_6d(param("ubar_thrust", 1.0), param("ubar_torque", 1.0), param("gravity", 9.81));
  } else {
    field_error("model.name", "unknown model '" + model + "'");
  }
  for (const auto& [key, value] : params)
    if (!allowed.count(key)) field_error("model.params." + key, "not a parameter of " + model);
  return m;
}

Grid RunConfig::build_grid() const {
  try {
    return Grid(grid_mins, grid_maxs, grid_counts);
  } catch (const std::exception& e) {
    field_error("grid", e.what());
  }
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig c;
  c.delta = delta;
  c.horizon = horizon;
  c.mode = mode;
  c.dissipation = dissipation;
  c.workers = workers;
  return c;
}

void RunConfig::validate() const {
  const SystemModel m = build_model();
  const Grid g = build_grid();
  if (g.dims() != m.n)
    field_error("grid", "has " + std::to_string(g.dims()) + " dimensions, model has " + std::to_string(m.n));
  const SolverConfig cfg = solver_config();
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    field_error("delta/horizon", e.what());
  }
  if (!dissipation.empty() && dissipation.size() != m.n)
    field_error("dissipation", "needs one coefficient per state dimension");
  if (!(threshold > 0.0)) field_error("threshold", "must be positive");
  if (!(frontier_threshold > 0.0)) field_error("frontier_threshold", "must be positive");
  if (workers == 0) field_error("workers", "must be at least 1");
  if (!run_direct && !run_decomposed) field_error("pipelines", "nothing to run");

  if (run_direct) {
    if (!target) field_error("targets.full", "required by the direct pipeline");
    if (target->required_dims() > m.n) field_error("targets.full", "references a dimension beyond the model state");
  }
  if (run_decomposed) {
    if (!m.has_schema()) field_error("model.name", "model has no partition schema for decomposition");
    if (!target1) field_error("targets.sub1", "required by the decomposed pipeline");
    if (!target2) field_error("targets.sub2", "required by the decomposed pipeline");
    const auto d1 = m.schema.subsystem_dims(1), d2 = m.schema.subsystem_dims(2);
    if (target1->required_dims() > d1.size()) field_error("targets.sub1", "references a dimension beyond subsystem 1");
    if (target2->required_dims() > d2.size()) field_error("targets.sub2", "references a dimension beyond subsystem 2");
  }
  if (run_corrected) {
    if (manual_delta) {
      if (delta_values.size() != cfg.steps())
        field_error("delta_policy.manual", "needs " + std::to_string(cfg.steps()) + " values, one per time step");
      for (double d : delta_values)
        if (!(d >= 0.0) || !std::isfinite(d)) field_error("delta_policy.manual", "values must be finite and >= 0");
    } else if (m.has_schema() && !m.schema.uc_idx.empty()) {
      field_error("delta_policy", "auto thresholds need a model without shared controls; give a manual list");
    }
  }

  for (Index i = 0; i < outputs.slices.size(); ++i) {
    const auto& s = outputs.slices[i];
    const std::string path = "outputs.slices[" + std::to_string(i) + "]";
    const bool available = (s.series == "direct" && run_direct) || (s.series == "approx" && run_decomposed) ||
                           (s.series == "corrected" && run_corrected);
    if (!available) field_error(path + ".series", "'" + s.series + "' is not produced by the selected pipelines");
    if (s.with_mask && !run_corrected) field_error(path + ".mask", "masks need the corrected pipeline");
    for (const auto& [d, v] : s.fixed) {
      if (d >= g.dims()) field_error(path + ".fixed", "dimension " + std::to_string(d) + " does not exist");
      if (v < g.mins()[d] - 1e-9 || v > g.maxs()[d] + 1e-9)
        field_error(path + ".fixed", "value for dimension " + std::to_string(d) + " lies outside the grid");
    }
    if (g.dims() - s.fixed.size() != 2) field_error(path + ".fixed", "must leave exactly two free dimensions");
    if (s.time) {
      const double k = -*s.time / delta;
      if (std::abs(k - std::round(k)) > 1e-9 || std::round(k) < 0 || std::round(k) > double(cfg.steps()))
        field_error(path + ".time", "is not a stored time");
    }
  }
}

RunConfig parse_run_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  c.name = get_or<std::string>(j, "name", "", "");

  const json& model = j.contains("model") ? j["model"] : json::object();
  c.model = get_or<std::string>(model, "name", c.model, "model.");
  c.params = get_or(model, "params", std::map<std::string, double>{}, "model.");

  if (!j.contains("grid")) field_error("grid", "missing");
  c.grid_mins = get_field<std::vector<double>>(j["grid"], "mins", "grid.");
  c.grid_maxs = get_field<std::vector<double>>(j["grid"], "maxs", "grid.");
  c.grid_counts = get_field<std::vector<Index>>(j["grid"], "counts", "grid.");

  try {
    c.mode = mode_from_string(get_or<std::string>(j, "mode", "reach", ""));
  } catch (const std::exception& e) {
    field_error("mode", e.what());
  }
  try {
    c.combo = combo_from_string(get_or<std::string>(j, "combo", "intersection", ""));
  } catch (const std::exception& e) {
    field_error("combo", e.what());
  }

  if (j.contains("targets")) {
    const json& t = j["targets"];
    if (t.contains("full")) c.target = parse_target(t["full"], "targets.full");
    if (t.contains("sub1")) c.target1 = parse_target(t["sub1"], "targets.sub1");
    if (t.contains("sub2")) c.target2 = parse_target(t["sub2"], "targets.sub2");
  }

  c.delta = get_or(j, "delta", c.delta, "");
  c.horizon = get_or(j, "horizon", c.horizon, "");
  if (j.contains("dissipation") && !(j["dissipation"].is_string() && j["dissipation"] == "auto"))
    c.dissipation = get_field<std::vector<double>>(j, "dissipation", "");

  if (j.contains("delta_policy")) {
    const json& p = j["delta_policy"];
    if (p.is_string()) {
      if (p != "auto") field_error("delta_policy", "expected \"auto\" or {\"manual\": [...]}");
    } else if (p.is_object() && p.contains("manual")) {
      c.manual_delta = true;
      c.delta_values = get_field<std::vector<double>>(p, "manual", "delta_policy.");
    } else {
      field_error("delta_policy", "expected \"auto\" or {\"manual\": [...]}");
    }
  }
  c.threshold = get_or(j, "threshold", c.threshold, "");
  c.frontier_threshold = get_or(j, "frontier_threshold", c.frontier_threshold, "");
  c.workers = get_or(j, "workers", c.workers, "");

  if (j.contains("pipelines")) {
    const auto names = get_field<std::vector<std::string>>(j, "pipelines", "");
    c.run_direct = c.run_decomposed = c.run_corrected = false;
    for (const auto& n : names) {
      if (n == "direct") c.run_direct = true;
      else if (n == "decomposed") c.run_decomposed = true;
      else if (n == "corrected") c.run_corrected = c.run_decomposed = true;
      else field_error("pipelines", "unknown pipeline '" + n + "'");
    }
  }

  if (j.contains("outputs")) {
    const json& o = j["outputs"];
    c.outputs.series = get_or(o, "series", c.outputs.series, "outputs.");
    c.outputs.subvalues = get_or(o, "subvalues", c.outputs.subvalues, "outputs.");
    c.outputs.mask = get_or(o, "mask", c.outputs.mask, "outputs.");
    if (o.contains("slices")) {
      if (!o["slices"].is_array()) field_error("outputs.slices", "expected an array");
      for (Index i = 0; i < o["slices"].size(); ++i) {
        const json& s = o["slices"][i];
        const std::string path = "outputs.slices[" + std::to_string(i) + "].";
        SliceSelection sel;
        sel.series = get_or<std::string>(s, "series", sel.series, path);
        if (s.contains("fixed")) {
          for (const auto& [key, value] : get_field<std::map<std::string, double>>(s, "fixed", path)) {
            Index d = 0;
            try {
              std::size_t used = 0;
              d = std::stoul(key, &used);
              if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
              field_error(path + "fixed", "keys must be dimension indices, got '" + key + "'");
            }
            sel.fixed[d] = value;
          }
        }
        if (s.contains("time")) sel.time = get_field<double>(s, "time", path);
        sel.with_mask = get_or(s, "mask", false, path);
        sel.file = get_or<std::string>(s, "file", sel.series + "_slice" + std::to_string(i) + ".csv", path);
        c.outputs.slices.push_back(std::move(sel));
      }
    }
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

RunResult run(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream* log) {
  config.validate();
  const SystemModel model = config.build_model();
  const Grid grid = config.build_grid();
  const SolverConfig cfg = config.solver_config();
  const ReconstructionMode rmode{config.combo, config.mode};
  auto say = [&](const std::string& msg) {
    if (log) *log << msg << '\n';
  };

  RunResult result;
  RunReport& report = result.report;
  using clock = std::chrono::steady_clock;

  if (config.run_direct) {
    const auto start = clock::now();
    result.direct = solve_hjb(model, grid, *config.target, cfg);
    report.t_direct = seconds_since(start);
    say("direct solve: " + std::to_string(report.t_direct) + " s");
  }

  if (config.run_decomposed) {
    const DecomposedTargets targets{*config.target1, *config.target2, config.target};
    auto start = clock::now();
    result.subvalues = solve_decomposed(model, grid, targets, rmode, cfg);
    result.approx = reconstruct(*result.subvalues, rmode);
    if (config.run_corrected) {
      if (!rmode.leaking_possible()) {
        result.mask = empty_mask(*result.approx);
      } else if (config.manual_delta) {
        result.mask = detect(*result.subvalues, config.delta_values, rmode);
      } else {
        const auto restricted = solve_restricted_subvalues(model, grid, targets, rmode, cfg);
        result.mask = detect(*result.subvalues, restricted, rmode);
      }
    }
    report.t_decomposed = seconds_since(start);
    say("decomposed solve: " + std::to_string(report.t_decomposed) + " s");

    if (config.run_corrected) {
      start = clock::now();
      auto lu = local_update(model, *result.approx, *result.mask, cfg, config.frontier_threshold);
      report.t_local_update = seconds_since(start);
      result.corrected = std::move(lu.corrected);
      report.has_correction = true;
      const Index last = result.mask->marked.size() - 1;
      report.detected = result.mask->count(last);
      report.islands = islands(*result.mask, last).size();
      report.local_updates = std::accumulate(lu.updates_per_step.begin(), lu.updates_per_step.end(), Index{0});
      report.delta_per_time = result.mask->delta_used;
      say("local update: " + std::to_string(report.t_local_update) + " s, " + std::to_string(report.local_updates) +
          " point updates");
    }
  }

  if (result.direct && result.approx) {
    report.has_comparison = true;
    report.before = compare(*result.approx, *result.direct, config.threshold);
    if (result.corrected) report.after = compare(*result.corrected, *result.direct, config.threshold);
  }

  if (out_dir.empty()) return result;
  std::filesystem::create_directories(out_dir);
  SeriesMeta meta{model.name, to_string(config.mode), config.delta, "", std::nullopt, {}};
  if (model.has_schema()) meta.schema = model.schema;
  if (config.outputs.series) {
    if (result.direct) {
      meta.role = "direct";
      write_series(*result.direct, meta, out_dir / "direct");
    }
    if (result.approx) {
      meta.role = "approx";
      write_series(*result.approx, meta, out_dir / "approx");
    }
    if (result.corrected) {
      meta.role = "corrected";
      write_series(*result.corrected, meta, out_dir / "corrected");
    }
  }
  if (config.outputs.subvalues && result.subvalues) {
    meta.role = "sub1";
    meta.subsystem_dims = result.subvalues->dims1;
    write_series(result.subvalues->sub1, meta, out_dir / "sub1");
    meta.role = "sub2";
    meta.subsystem_dims = result.subvalues->dims2;
    write_series(result.subvalues->sub2, meta, out_dir / "sub2");
  }
  if (config.outputs.mask && result.mask) write_mask(*result.mask, out_dir / "mask.json");

  for (const auto& sel : config.outputs.slices) {
    const ValueSeries& s = sel.series == "direct" ? *result.direct
                           : sel.series == "approx" ? *result.approx
                                                    : *result.corrected;
    const double t = sel.time.value_or(s.times.back());
    auto path = out_dir / sel.file;
    auto mask_path = path;
    mask_path.replace_filename(path.stem().string() + "_mask.csv");
    auto info = export_slice(s, sel.fixed, t, path, sel.with_mask ? &*result.mask : nullptr, mask_path);
    for (const auto& [d, dist] : info.snap_distance)
      if (dist > 1e-12)
        say("slice " + sel.file + ": dimension " + std::to_string(d) + " snapped to " +
            std::to_string(info.snapped[d]) + " (distance " + std::to_string(dist) + ")");
    result.slices.push_back(std::move(info));
  }

  std::ofstream(out_dir / "report.json") << report_to_json(report) << '\n';
  std::ofstream(out_dir / "report.txt") << report_to_text(report);
  return result;
}

}  // namespace hjleak
