#include "hjleak/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "hjleak/errors.hpp"

namespace hjleak {

using nlohmann::json;

namespace {

json grid_to_json(const Grid& g) { return {{"mins", g.mins()}, {"maxs", g.maxs()}, {"counts", g.counts()}}; }

Grid grid_from_json(const json& j) {
  return Grid(j.at("mins").get<std::vector<double>>(), j.at("maxs").get<std::vector<double>>(),
              j.at("counts").get<std::vector<Index>>());
}

json schema_to_json(const PartitionSchema& s) {
  return {{"z1", s.z1_dims}, {"z2", s.z2_dims}, {"zc", s.zc_dims},
          {"u1", s.u1_idx},  {"u2", s.u2_idx},  {"uc", s.uc_idx}};
}

PartitionSchema schema_from_json(const json& j) {
  PartitionSchema s;
  s.z1_dims = j.at("z1").get<std::vector<Index>>();
  s.z2_dims = j.at("z2").get<std::vector<Index>>();
  s.zc_dims = j.at("zc").get<std::vector<Index>>();
  s.u1_idx = j.at("u1").get<std::vector<Index>>();
  s.u2_idx = j.at("u2").get<std::vector<Index>>();
  s.uc_idx = j.at("uc").get<std::vector<Index>>();
  return s;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string slice_name(const std::filesystem::path& stem, Index k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_t%03zu.f64", k);
  return stem.filename().string() + buf;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

}  // namespace

void write_series(const ValueSeries& series, const SeriesMeta& meta, const std::filesystem::path& stem) {
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  json j;
  j["grid"] = grid_to_json(series.grid);
  j["times"] = series.times;
  j["mode"] = meta.mode;
  j["model"] = meta.model;
  j["delta"] = meta.delta;
  j["role"] = meta.role;
  j["dtype"] = "float64-le";
  j["order"] = "row-major";
  if (meta.schema) j["schema"] = schema_to_json(*meta.schema);
  if (!meta.subsystem_dims.empty()) j["subsystem_dims"] = meta.subsystem_dims;
  json files = json::array();
  for (Index k = 0; k < series.slices.size(); ++k) {
    const std::string name = slice_name(stem, k);
    files.push_back(name);
    const auto path = stem.parent_path() / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    const auto& s = series.slices[k];
    if constexpr (std::endian::native == std::endian::little) {
      out.write(reinterpret_cast<const char*>(s.data()), static_cast<std::streamsize>(s.size() * sizeof(double)));
    } else {
      for (double v : s) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        bits = __builtin_bswap64(bits);
        out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
      }
    }
  }
  j["slices"] = files;
  write_text(stem.string() + ".json", j.dump(2) + "\n");
}

ValueSeries read_series(const std::filesystem::path& json_path, SeriesMeta* meta) {
  const json j = read_json(json_path);
  ValueSeries out;
  try {
    out.grid = grid_from_json(j.at("grid"));
    out.times = j.at("times").get<std::vector<double>>();
    if (meta) {
      meta->model = j.value("model", "");
      meta->mode = j.value("mode", "");
      meta->delta = j.value("delta", 0.0);
      meta->role = j.value("role", "");
      if (j.contains("schema")) meta->schema = schema_from_json(j["schema"]);
      if (j.contains("subsystem_dims")) meta->subsystem_dims = j["subsystem_dims"].get<std::vector<Index>>();
    }
    const auto files = j.at("slices").get<std::vector<std::string>>();
    if (files.size() != out.times.size()) throw ConfigError("series metadata lists a different number of slices and times");
    for (const auto& name : files) {
      const auto path = json_path.parent_path() / name;
      std::ifstream in(path, std::ios::binary);
      if (!in) throw ConfigError("cannot open slice file " + path.string());
      std::vector<double> s(out.grid.size());
      in.read(reinterpret_cast<char*>(s.data()), static_cast<std::streamsize>(s.size() * sizeof(double)));
      if (in.gcount() != static_cast<std::streamsize>(s.size() * sizeof(double)))
        throw ConfigError("slice file " + path.string() + " is shorter than the grid");
      if constexpr (std::endian::native != std::endian::little) {
        for (double& v : s) v = std::bit_cast<double>(__builtin_bswap64(std::bit_cast<std::uint64_t>(v)));
      }
      out.slices.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw ConfigError("invalid series metadata " + json_path.string() + ": " + e.what());
  }
  return out;
}

std::vector<Index> run_length_encode(const std::vector<std::uint8_t>& marked) {
  std::vector<Index> runs;
  std::uint8_t current = 0;
  Index length = 0;
  for (std::uint8_t v : marked) {
    const std::uint8_t b = v ? 1 : 0;
    if (b != current) {
      runs.push_back(length);
      current = b;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

std::vector<std::uint8_t> run_length_decode(const std::vector<Index>& runs, Index size) {
  std::vector<std::uint8_t> out;
  out.reserve(size);
  std::uint8_t value = 0;
  for (Index r : runs) {
    out.insert(out.end(), r, value);
    value ^= 1;
  }
  if (out.size() != size) throw ConfigError("run-length encoding does not match the grid size");
  return out;
}

void write_mask(const LeakingMask& mask, const std::filesystem::path& path) {
  json j;
  j["grid"] = grid_to_json(mask.grid);
  j["times"] = mask.times;
  j["delta_used"] = mask.delta_used;
  j["delta_policy"] = mask.manual ? "manual" : "auto";
  json counts = json::array(), rle = json::array();
  for (Index k = 0; k < mask.marked.size(); ++k) {
    counts.push_back(mask.count(k));
    rle.push_back(run_length_encode(mask.marked[k]));
  }
  j["counts"] = counts;
  j["rle"] = rle;
  write_text(path, j.dump() + "\n");
}

LeakingMask read_mask(const std::filesystem::path& path) {
  const json j = read_json(path);
  LeakingMask mask;
  try {
    mask.grid = grid_from_json(j.at("grid"));
    mask.times = j.at("times").get<std::vector<double>>();
    mask.delta_used = j.at("delta_used").get<std::vector<double>>();
    mask.manual = j.value("delta_policy", "auto") == "manual";
    for (const auto& runs : j.at("rle")) mask.marked.push_back(run_length_decode(runs.get<std::vector<Index>>(), mask.grid.size()));
  } catch (const json::exception& e) {
    throw ConfigError("invalid mask file " + path.string() + ": " + e.what());
  }
  return mask;
}

SliceExport export_slice(const ValueSeries& series, const std::map<Index, double>& fixed, double t,
                         const std::filesystem::path& path, const LeakingMask* mask,
                         const std::filesystem::path& mask_path) {
  const Grid& g = series.grid;
  std::vector<Index> free_dims;
  for (Index d = 0; d < g.dims(); ++d)
    if (!fixed.count(d)) free_dims.push_back(d);
  for (const auto& [d, v] : fixed)
    if (d >= g.dims()) throw ConfigError("fixed dimension " + std::to_string(d) + " does not exist");
  if (free_dims.size() != 2)
    throw ConfigError("slice export needs exactly two free dimensions, got " + std::to_string(free_dims.size()));
  const Index k = series.time_index(t);

  SliceExport info;
  info.dim_i = free_dims[0];
  info.dim_j = free_dims[1];
  std::vector<Index> base(g.dims(), 0);
  for (const auto& [d, v] : fixed) {
    if (v < g.mins()[d] - 1e-9 || v > g.maxs()[d] + 1e-9)
      throw ConfigError("fixed value for dimension " + std::to_string(d) + " lies outside the grid");
    const double r = std::clamp(std::round((v - g.mins()[d]) / g.spacings()[d]), 0.0,
                                static_cast<double>(g.counts()[d] - 1));
    base[d] = static_cast<Index>(r);
    info.snapped[d] = g.coordinate(d, base[d]);
    info.snap_distance[d] = std::abs(v - info.snapped[d]);
  }

  const std::vector<std::uint8_t>* flags = nullptr;
  if (mask) {
    if (!(mask->grid == g)) throw ConfigError("mask grid does not match the series grid");
    flags = &mask->marked.at(mask->times.size() == series.times.size() ? k : 0);
  }

  std::ostringstream csv, mcsv;
  csv << std::setprecision(17);
  const std::string header = "dim_" + std::to_string(info.dim_i) + ",dim_" + std::to_string(info.dim_j) + ",value\n";
  csv << header;
  mcsv << header;
  std::vector<Index> multi = base;
  for (Index i = 0; i < g.counts()[info.dim_i]; ++i) {
    for (Index j = 0; j < g.counts()[info.dim_j]; ++j) {
      multi[info.dim_i] = i;
      multi[info.dim_j] = j;
      const Index lin = g.linear(multi);
      const double xi = g.coordinate(info.dim_i, i), xj = g.coordinate(info.dim_j, j);
      csv << xi << ',' << xj << ',' << series.slices[k][lin] << '\n';
      if (flags) mcsv << std::setprecision(17) << xi << ',' << xj << ',' << int((*flags)[lin]) << '\n';
      ++info.rows;
    }
  }
  write_text(path, csv.str());
  if (flags) {
    auto mp = mask_path.empty() ? std::filesystem::path(path.string() + ".mask.csv") : mask_path;
    write_text(mp, mcsv.str());
  }
  return info;
}

std::string comparison_to_json(const Comparison& c) {
  json j{{"mismatches", c.mismatches}, {"avg_abs_diff", c.avg_abs_diff}, {"max_abs_diff", c.max_abs_diff}};
  return j.dump(2);
}

std::string report_to_json(const RunReport& r, int indent) {
  json j;
  if (r.has_comparison) {
    j["n_mismatch_before"] = r.before.mismatches;
    j["avg_abs_diff_before"] = r.before.avg_abs_diff;
    j["max_abs_diff_before"] = r.before.max_abs_diff;
    if (r.has_correction) {
      j["n_mismatch_after"] = r.after.mismatches;
      j["avg_abs_diff_after"] = r.after.avg_abs_diff;
      j["max_abs_diff_after"] = r.after.max_abs_diff;
    }
  }
  if (r.has_correction) {
    j["detected"] = r.detected;
    j["islands"] = r.islands;
    j["local_updates"] = r.local_updates;
    j["delta_per_time"] = r.delta_per_time;
  }
  j["t_direct"] = r.t_direct;
  j["t_decomposed"] = r.t_decomposed;
  j["t_local_update"] = r.t_local_update;
  return j.dump(indent);
}

std::string report_to_text(const RunReport& r) {
  std::ostringstream s;
  auto row = [&](const std::string& a, const std::string& b, const std::string& c) {
    s << std::left << std::setw(44) << a << std::setw(14) << b << c << '\n';
  };
  const bool after = r.has_correction;
  if (r.has_comparison) {
    row("Metric", "Before", after ? "After" : "");
    row("Grid points differing from ground truth", std::to_string(r.before.mismatches),
        after ? std::to_string(r.after.mismatches) : "");
    row("Average absolute difference", fmt(r.before.avg_abs_diff), after ? fmt(r.after.avg_abs_diff) : "");
    row("Maximum absolute difference", fmt(r.before.max_abs_diff), after ? fmt(r.after.max_abs_diff) : "");
    s << '\n';
  }
  if (after) {
    row("Detected leaking corners (final time)", std::to_string(r.detected), "");
    row("Islands (final time)", std::to_string(r.islands), "");
    row("Local point updates", std::to_string(r.local_updates), "");
    s << '\n';
  }
  row("Process", "Time (s)", "");
  if (r.t_direct > 0.0) row("Direct computation", fmt(r.t_direct), "");
  if (after)
    row("Decomposition + local update",
        fmt(r.t_decomposed) + " + " + fmt(r.t_local_update) + " = " + fmt(r.t_decomposed + r.t_local_update), "");
  else if (r.t_decomposed > 0.0)
    row("Decomposition", fmt(r.t_decomposed), "");
  return s.str();
}

}  // namespace hjleak
