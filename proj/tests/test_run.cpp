#include <doctest.h>

#include <json.hpp>

#include "hjleak/errors.hpp"
#include "hjleak/run.hpp"
#include "temp_dir.hpp"

using namespace hjleak;
using nlohmann::json;

namespace {

std::filesystem::path config_path(const std::string& name) {
  return std::filesystem::path(HJLEAK_CONFIG_DIR) / (name + ".json");
}

json bundled(const std::string& name) { return json::parse(testing::slurp(config_path(name))); }

std::string config_error(const json& j) {
  try {
    parse_run_config(j.dump()).validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("run") {

TEST_CASE("bundled configs parse and validate") {
  for (const char* name : {"si2d_one_step", "si2d_ten_steps", "quad6d_11", "quad6d_21"}) {
    CAPTURE(name);
    const auto c = load_run_config(config_path(name));
    CHECK_NOTHROW(c.validate());
    CHECK(c.name == name);
  }
  const auto q = load_run_config(config_path("quad6d_11"));
  CHECK(q.manual_delta);
  REQUIRE(q.delta_values.size() == 5);
  CHECK(q.delta_values[0] == doctest::Approx(0.04));
  CHECK(q.delta_values[4] == doctest::Approx(0.2));
  CHECK(q.combo == Combo::Union);
  CHECK(q.mode == Mode::Avoid);
}

TEST_CASE("validation errors name the field") {
  auto j = bundled("si2d_one_step");
  j.erase("grid");
  CHECK(config_error(j).find("'grid'") != std::string::npos);

  j = bundled("si2d_one_step");
  j["model"]["name"] = "unicycle";
  CHECK(config_error(j).find("model.name") != std::string::npos);

  j = bundled("si2d_one_step");
  j["model"]["params"]["mass"] = 2.0;
  CHECK(config_error(j).find("model.params.mass") != std::string::npos);

  j = bundled("si2d_ten_steps");
  j["delta_policy"]["manual"] = {0.2, 0.2};
  CHECK(config_error(j).find("delta_policy.manual") != std::string::npos);

  j = bundled("quad6d_11");
  j["delta_policy"] = "auto";
  CHECK(config_error(j).find("delta_policy") != std::string::npos);

  j = bundled("si2d_one_step");
  j["outputs"]["slices"] = json::array({{{"series", "direct"}, {"fixed", {{"0", 0.0}}}}});
  CHECK(config_error(j).find("outputs.slices[0].fixed") != std::string::npos);

  j = bundled("quad6d_11");
  j["outputs"]["slices"][0]["fixed"]["2"] = 7.0;
  CHECK(config_error(j).find("outside the grid") != std::string::npos);

  j = bundled("si2d_one_step");
  j["targets"]["sub1"] = {{"type", "ellipse"}};
  CHECK(config_error(j).find("targets.sub1.type") != std::string::npos);

  j = bundled("si2d_one_step");
  j["horizon"] = -0.03;
  CHECK(config_error(j).find("delta/horizon") != std::string::npos);

  j = bundled("si2d_one_step");
  j["pipelines"] = {"direct", "fastest"};
  CHECK(config_error(j).find("pipelines") != std::string::npos);

  CHECK_THROWS_AS(parse_run_config("{not json"), ConfigError);
}

TEST_CASE("one-step config reproduces the table") {
  testing::TempDir dir("run1");
  const auto result = run(load_run_config(config_path("si2d_one_step")), dir.path());
  const auto& r = result.report;
  CHECK(r.has_comparison);
  CHECK(r.before.mismatches == 200);
  CHECK(r.after.mismatches == 0);
  CHECK(r.detected == 200);
  CHECK(r.before.mismatches == compare(*result.approx, *result.direct, 1e-3).mismatches);

  const auto j = json::parse(testing::slurp(dir / "report.json"));
  CHECK(j["n_mismatch_before"] == 200);
  CHECK(j["n_mismatch_after"] == 0);
  for (const char* f : {"direct.json", "approx.json", "corrected.json", "sub1.json", "sub2.json", "mask.json",
                        "report.txt", "approx.csv", "approx_mask.csv"})
    CHECK(std::filesystem::exists(dir / f));
}

TEST_CASE("ten-step config reproduces the table") {
  const auto result = run(load_run_config(config_path("si2d_ten_steps")), {});
  CHECK(result.report.before.mismatches == 1344);
  CHECK(result.report.after.mismatches == 0);
  CHECK(result.report.detected == 1001);
}

TEST_CASE("decomposed-only runs export only the approximation") {
  testing::TempDir dir("decomposed_only");
  auto j = bundled("si2d_one_step");
  j["pipelines"] = {"decomposed"};
  j["outputs"]["slices"] = json::array({{{"series", "approx"}, {"file", "approx.csv"}}});
  const auto result = run(parse_run_config(j.dump()), dir.path());
  CHECK_FALSE(result.report.has_comparison);
  CHECK_FALSE(result.report.has_correction);
  CHECK_FALSE(json::parse(testing::slurp(dir / "report.json")).contains("n_mismatch_before"));
  CHECK(std::filesystem::exists(dir / "approx.json"));
  for (const char* f : {"direct.json", "corrected.json", "mask.json"}) CHECK_FALSE(std::filesystem::exists(dir / f));

  j["outputs"]["slices"] = json::array({{{"series", "corrected"}}});
  CHECK_THROWS_AS(parse_run_config(j.dump()).validate(), ConfigError);
}

TEST_CASE("identical configs give bitwise identical exports") {
  testing::TempDir a("det_a"), b("det_b");
  auto cfg = load_run_config(config_path("si2d_ten_steps"));
  cfg.workers = 1;
  run(cfg, a.path());
  cfg.workers = 3;
  run(cfg, b.path());
  for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
    const auto name = entry.path().filename().string();
    if (name.rfind("report", 0) == 0) continue;  // carries timings
    CAPTURE(name);
    CHECK(testing::slurp(entry.path()) == testing::slurp(b / name));
  }
}

TEST_CASE("CFL failures surface as numerical errors") {
  auto j = bundled("si2d_one_step");
  j["dissipation"] = "auto";
  j["delta"] = 0.1;
  j["horizon"] = -0.1;
  CHECK_THROWS_AS(run(parse_run_config(j.dump()), {}), CflError);
}

}  // TEST_SUITE
