// hjleak: run reachability pipelines, compare value series, export slices.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hjleak/errors.hpp"
#include "hjleak/io.hpp"
#include "hjleak/run.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

std::map<hjleak::Index, double> parse_fixed(const std::vector<std::string>& items) {
  std::map<hjleak::Index, double> fixed;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw hjleak::ConfigError("--fixed expects DIM=VALUE, got '" + item + "'");
    try {
      fixed[std::stoul(item.substr(0, eq))] = std::stod(item.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw hjleak::ConfigError("--fixed expects DIM=VALUE, got '" + item + "'");
    }
  }
  return fixed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamilton-Jacobi reachability with decomposition and leaking-corner correction"};
  app.require_subcommand(1);

  std::string config_path, out_dir, series_a, series_b, mask_path, mask_out;
  std::optional<unsigned> workers;
  std::optional<double> threshold, time;
  std::vector<std::string> fixed;

  auto* run_cmd = app.add_subcommand("run", "Execute the pipelines of a run config");
  run_cmd->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  run_cmd->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  run_cmd->add_option("--threshold", threshold, "Value equality threshold (overrides the config)");

  auto* cmp_cmd = app.add_subcommand("compare", "Compare the final slices of two exported series");
  cmp_cmd->add_option("a", series_a, "Series metadata (JSON)")->required()->check(CLI::ExistingFile);
  cmp_cmd->add_option("b", series_b, "Series metadata (JSON)")->required()->check(CLI::ExistingFile);
  cmp_cmd->add_option("--threshold", threshold, "Value equality threshold")->default_str("0.001");
  cmp_cmd->add_option("--out", out_dir, "Write the comparison JSON here instead of stdout");

  auto* exp_cmd = app.add_subcommand("export-slice", "Write a 2D CSV slice of an exported series");
  exp_cmd->add_option("--series", series_a, "Series metadata (JSON)")->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--out", out_dir, "Output CSV path")->required();
  exp_cmd->add_option("--fixed", fixed, "Fixed coordinate DIM=VALUE (repeatable)");
  exp_cmd->add_option("--time", time, "Stored time (default: final)");
  exp_cmd->add_option("--mask", mask_path, "Leaking mask (JSON) for a companion flag CSV")->check(CLI::ExistingFile);
  exp_cmd->add_option("--mask-out", mask_out, "Companion mask CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) {
      auto cfg = hjleak::load_run_config(config_path);
      if (workers) cfg.workers = *workers;
      if (threshold) cfg.threshold = *threshold;
      const auto result = hjleak::run(cfg, out_dir, &std::cerr);
      std::cout << hjleak::report_to_text(result.report);
    } else if (*cmp_cmd) {
      const auto a = hjleak::read_series(series_a);
      const auto b = hjleak::read_series(series_b);
      const auto c = hjleak::compare(a, b, threshold.value_or(1e-3));
      const auto text = hjleak::comparison_to_json(c);
      if (out_dir.empty()) {
        std::cout << text << '\n';
      } else {
        std::ofstream(out_dir) << text << '\n';
      }
    } else if (*exp_cmd) {
      const auto s = hjleak::read_series(series_a);
      std::optional<hjleak::LeakingMask> mask;
      if (!mask_path.empty()) mask = hjleak::read_mask(mask_path);
      const auto info = hjleak::export_slice(s, parse_fixed(fixed), time.value_or(s.times.back()), out_dir,
                                             mask ? &*mask : nullptr, mask_out);
      for (const auto& [d, dist] : info.snap_distance)
        if (dist > 1e-12)
          std::cerr << "dimension " << d << " snapped to " << info.snapped.at(d) << " (distance " << dist << ")\n";
      std::cerr << "wrote " << info.rows << " rows to " << out_dir << '\n';
    }
  } catch (const hjleak::CflError& e) {
    std::cerr << "numerical error: " << e.what() << "\nhint: reduce delta to at most " << e.max_delta()
              << " or coarsen the grid\n";
    return kNumericalError;
  } catch (const hjleak::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const hjleak::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const hjleak::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const hjleak::DecompositionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
