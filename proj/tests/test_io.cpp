#include <doctest.h>

#include <cstring>
#include <sstream>

#include <json.hpp>

#include "hjleak/errors.hpp"
#include "hjleak/io.hpp"
#include "support.hpp"
#include "temp_dir.hpp"

using namespace hjleak;
using nlohmann::json;

namespace {

ValueSeries ramp_series(const Grid& g, Index slices) {
  ValueSeries s{g, {}, {}};
  for (Index k = 0; k < slices; ++k) {
    s.times.push_back(-0.02 * static_cast<double>(k));
    std::vector<double> v(g.size());
    for (Index i = 0; i < v.size(); ++i) v[i] = 0.001 * static_cast<double>(i) - 0.5 * static_cast<double>(k);
    s.slices.push_back(std::move(v));
  }
  return s;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("value series round trip") {
  testing::TempDir dir("series");
  const auto s = ramp_series(Grid({-1, 0}, {1, 2}, {5, 7}), 3);
  SeriesMeta meta{"single_integrator_2d", "reach", 0.02, "approx", std::nullopt, {}};
  write_series(s, meta, dir / "approx");
  CHECK(std::filesystem::file_size(dir / "approx_t001.f64") == 35 * sizeof(double));

  // Little-endian float64 in row-major order.
  const auto raw = testing::slurp(dir / "approx_t002.f64");
  const unsigned char* b = reinterpret_cast<const unsigned char*>(raw.data()) + 8 * 3;
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | b[i];
  double v;
  std::memcpy(&v, &bits, sizeof v);
  CHECK(v == s.slices[2][3]);

  SeriesMeta back;
  const auto r = read_series(dir / "approx.json", &back);
  CHECK(r.grid == s.grid);
  CHECK(r.times == s.times);
  CHECK(r.slices == s.slices);
  CHECK(back.model == "single_integrator_2d");
  CHECK(back.mode == "reach");
  CHECK(back.delta == 0.02);

  const auto side = json::parse(testing::slurp(dir / "approx.json"));
  for (const char* key : {"grid", "times", "mode", "model", "delta"}) CHECK(side.contains(key));
}

TEST_CASE("sub-value exports carry the schema") {
  testing::TempDir dir("subseries");
  const auto s = ramp_series(Grid({-1}, {1}, {5}), 2);
  SeriesMeta meta{"single_integrator_2d", "reach", 0.02, "sub1", PartitionSchema{{0}, {1}, {}, {0}, {1}, {}}, {0}};
  write_series(s, meta, dir / "sub1");
  SeriesMeta back;
  read_series(dir / "sub1.json", &back);
  REQUIRE(back.schema.has_value());
  CHECK(back.schema->z2_dims == std::vector<Index>{1});
  CHECK(back.subsystem_dims == std::vector<Index>{0});
}

TEST_CASE("truncated slice files are reported") {
  testing::TempDir dir("trunc");
  const auto s = ramp_series(Grid({-1}, {1}, {5}), 1);
  write_series(s, {}, dir / "x");
  std::filesystem::resize_file(dir / "x_t000.f64", 16);
  CHECK_THROWS_AS(read_series(dir / "x.json"), ConfigError);
  CHECK_THROWS_AS(read_series(dir / "missing.json"), ConfigError);
}

TEST_CASE("run-length encoding") {
  CHECK(run_length_encode({0, 0, 1, 1, 1, 0}) == std::vector<Index>{2, 3, 1});
  CHECK(run_length_encode({1, 0}) == std::vector<Index>{0, 1, 1});
  CHECK(run_length_encode({0, 0, 0}) == std::vector<Index>{3});
  CHECK(run_length_decode({0, 1, 1}, 2) == std::vector<std::uint8_t>{1, 0});
  CHECK_THROWS_AS(run_length_decode({2, 2}, 3), ConfigError);
}

TEST_CASE("mask round trip") {
  testing::TempDir dir("mask");
  const Grid g({0, 0}, {1, 1}, {4, 5});
  LeakingMask m{g, {0.0, -0.02}, {std::vector<std::uint8_t>(20, 0), std::vector<std::uint8_t>(20, 0)}, {0.0, 0.02}, true};
  m.marked[1][3] = m.marked[1][4] = m.marked[1][19] = 1;
  write_mask(m, dir / "mask.json");
  const auto back = read_mask(dir / "mask.json");
  CHECK(back.grid == g);
  CHECK(back.marked == m.marked);
  CHECK(back.delta_used == m.delta_used);
  CHECK(back.manual);
  const auto j = json::parse(testing::slurp(dir / "mask.json"));
  CHECK(j["counts"] == json::array({0, 3}));
}

TEST_CASE("2D slice export") {
  testing::TempDir dir("csv2d");
  const Grid g = testing::si_grid();
  const auto s = ramp_series(g, 2);
  const auto info = export_slice(s, {}, -0.02, dir / "v.csv");
  CHECK(info.rows == 10201);
  const auto l = lines(testing::slurp(dir / "v.csv"));
  REQUIRE(l.size() == 10202);
  CHECK(l[0] == "dim_0,dim_1,value");
  CHECK(l[1].rfind("-4,-4,", 0) == 0);
  CHECK(std::stod(l[2].substr(l[2].rfind(',') + 1)) == s.slices[1][1]);
}

TEST_CASE("6D slice export over position") {
  testing::TempDir dir("csv6d");
  const Grid g({-1, -1, -2, -2, -2, -2}, {4, 4, 2, 2, 2, 2}, {21, 21, 5, 5, 5, 5});
  const auto s = ramp_series(g, 1);
  std::vector<std::uint8_t> flags(g.size(), 0);
  // Mark two cells on the requested slice and one elsewhere.
  const auto on = [&](Index i, Index j) { return g.linear(std::vector<Index>{i, j, 1, 1, 2, 2}); };
  flags[on(0, 0)] = flags[on(3, 4)] = 1;
  flags[g.linear(std::vector<Index>{0, 0, 0, 0, 0, 0})] = 1;
  LeakingMask mask{g, {0.0}, {flags}, {0.0}, true};

  const std::map<Index, double> fixed{{2, -1.0}, {3, -1.0}, {4, 0.0}, {5, 0.4}};
  const auto info = export_slice(s, fixed, 0.0, dir / "xy.csv", &mask, dir / "xy_mask.csv");
  CHECK(info.dim_i == 0);
  CHECK(info.dim_j == 1);
  CHECK(info.rows == 441);
  CHECK(info.snapped.at(5) == doctest::Approx(0.0));
  CHECK(info.snap_distance.at(5) == doctest::Approx(0.4));
  CHECK(info.snap_distance.at(2) == doctest::Approx(0.0));
  const auto l = lines(testing::slurp(dir / "xy.csv"));
  CHECK(l.size() == 442);
  CHECK(l[0] == "dim_0,dim_1,value");
  const auto ml = lines(testing::slurp(dir / "xy_mask.csv"));
  REQUIRE(ml.size() == 442);
  int flagged = 0;
  for (Index r = 1; r < ml.size(); ++r) flagged += ml[r].back() == '1';
  CHECK(flagged == 2);

  CHECK_THROWS_AS(export_slice(s, {{2, -1.0}}, 0.0, dir / "bad.csv"), ConfigError);
  CHECK_THROWS_AS(export_slice(s, {{2, -3.0}, {3, 0.0}, {4, 0.0}, {5, 0.0}}, 0.0, dir / "bad.csv"), ConfigError);
  CHECK_THROWS_AS(export_slice(s, fixed, -0.5, dir / "bad.csv"), DomainError);
}

TEST_CASE("report formats") {
  RunReport r;
  r.t_decomposed = 0.1;
  auto j = json::parse(report_to_json(r));
  CHECK_FALSE(j.contains("n_mismatch_before"));
  CHECK_FALSE(j.contains("detected"));
  r.has_comparison = r.has_correction = true;
  r.before = {200, 1.2e-4, 2e-2};
  r.detected = 200;
  j = json::parse(report_to_json(r));
  CHECK(j["n_mismatch_before"] == 200);
  CHECK(j["n_mismatch_after"] == 0);
  CHECK(j["detected"] == 200);
  const auto text = report_to_text(r);
  CHECK(text.find("Grid points differing from ground truth") != std::string::npos);
  CHECK(text.find("Decomposition + local update") != std::string::npos);
}

}  // TEST_SUITE
