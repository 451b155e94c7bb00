#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "hjleak/decomposition.hpp"
#include "hjleak/io.hpp"
#include "hjleak/leaking.hpp"

namespace hjleak {

struct SliceSelection {
  std::string series = "corrected";  // direct, approx or corrected
  std::map<Index, double> fixed;
  std::optional<double> time;        // defaults to the final time
  bool with_mask = false;
  std::string file;                  // relative to the output directory
};

struct RunOutputs {
  bool series = true;
  bool subvalues = false;
  bool mask = true;
  std::vector<SliceSelection> slices;
};

struct RunConfig {
  std::string name;
  std::string model = "single_integrator_2d";
  std::map<std::string, double> params;
  std::vector<double> grid_mins, grid_maxs;
  std::vector<Index> grid_counts;
  Mode mode = Mode::Reach;
  Combo combo = Combo::Intersection;
  std::optional<TargetSpec> target, target1, target2;
  double delta = 0.02;
  double horizon = -0.02;
  std::vector<double> dissipation;  // empty: automatic
  bool manual_delta = false;
  std::vector<double> delta_values;  // one per non-terminal time
  double threshold = 1e-3;
  double frontier_threshold = 1e-6;
  bool run_direct = true, run_decomposed = true, run_corrected = true;
  unsigned workers = 1;
  RunOutputs outputs;

  SystemModel build_model() const;
  Grid build_grid() const;
  SolverConfig solver_config() const;
  void validate() const;
};

RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

struct RunResult {
  RunReport report;
  std::optional<ValueSeries> direct, approx, corrected;
  std::optional<SubValuePair> subvalues;
  std::optional<LeakingMask> mask;
  std::vector<SliceExport> slices;
};

/// Executes the requested pipelines. Artifacts go to `out_dir` unless it is
/// empty; timings exclude file I/O.
RunResult run(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream* log = nullptr);

}  // namespace hjleak
