#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hjleak/grid.hpp"
#include "hjleak/leaking.hpp"
#include "hjleak/solver.hpp"

namespace hjleak {

/// Sidecar metadata stored next to exported value slices.
struct SeriesMeta {
  std::string model;
  std::string mode;
  double delta = 0.0;
  std::string role;               // direct, decomposed, corrected, sub1, ...
  std::optional<PartitionSchema> schema;
  std::vector<Index> subsystem_dims;  // full-grid dims of a subsystem series
};

// Writes <stem>.json plus one little-endian float64 file per slice,
// <stem>_t<k>.f64, in row-major grid order.
void write_series(const ValueSeries& series, const SeriesMeta& meta, const std::filesystem::path& stem);
ValueSeries read_series(const std::filesystem::path& json_path, SeriesMeta* meta = nullptr);

// One JSON document: grid, times, thresholds and a run-length encoding per
// slice (alternating runs, starting with unmarked).
void write_mask(const LeakingMask& mask, const std::filesystem::path& path);
LeakingMask read_mask(const std::filesystem::path& path);
std::vector<Index> run_length_encode(const std::vector<std::uint8_t>& marked);
std::vector<std::uint8_t> run_length_decode(const std::vector<Index>& runs, Index size);

struct SliceExport {
  Index dim_i = 0, dim_j = 0;
  Index rows = 0;
  std::map<Index, double> snapped;        // fixed dim -> grid coordinate used
  std::map<Index, double> snap_distance;  // fixed dim -> |requested - used|
};

/// Writes a CSV over the two free dimensions ("dim_i,dim_j,value"); fixed
/// values snap to the nearest grid node. With a mask, a companion CSV holds
/// 0/1 leaking flags in the value column.
SliceExport export_slice(const ValueSeries& series, const std::map<Index, double>& fixed, double t,
                         const std::filesystem::path& path, const LeakingMask* mask = nullptr,
                         const std::filesystem::path& mask_path = {});

std::string report_to_json(const RunReport& report, int indent = 2);
std::string report_to_text(const RunReport& report);
std::string comparison_to_json(const Comparison& c);

}  // namespace hjleak
