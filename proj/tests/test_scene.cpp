#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cluscat/scene.hpp"

using namespace cluscat;
namespace fs = std::filesystem;

namespace {

Json base_json() {
  return Json::parse(R"({
    "schema_version": 1,
    "media": {
      "water": {"rho_kg_m3": 1.0, "gamma_pa_inv": 1.0},
      "oil": {"rho_kg_m3": 1.4, "gamma_pa_inv": 0.7}
    },
    "exterior_medium": "water",
    "host": {"center_m": [0, 0, 0], "radius_m": 1.0, "medium": "oil"},
    "source": {"position_m": [0.2, 0.0, 0.1],
               "amplitude_pa_m": {"re": 1.0, "im": 0.0}},
    "scatterers": [
      {"position_m": [2.0, 0.0, 0.3],
       "strength_pa_m": {"re": 0.8, "im": -0.1}},
      {"position_m": [-1.1, 1.7, 0.3],
       "strength_pa_m": {"re": 0.0, "im": 0.2}}
    ],
    "omega_rad_s": 1.0
  })");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path temp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("cluscat_test_" + tag);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("parse fills defaults and echoes the effective config") {
  SceneConfig cfg = parse_scene(base_json());
  CHECK(cfg.omega == 1.0);
  CHECK(cfg.scatterers.size() == 2);
  CHECK_FALSE(cfg.foldy_self_consistent);
  CHECK(cfg.truncation_order == 0);
  CHECK(cfg.flux_radii_k0R == std::vector<double>{100.0, 200.0, 400.0});
  CHECK(cfg.seed == 42);
  CHECK(cfg.tasks == std::vector<std::string>{"report"});
  CHECK(cfg.echo["numerics"]["seed"] == 42);
  CHECK(cfg.echo["foldy"] == "fixed");
  CHECK(cfg.media.at("oil").gamma == 0.7);
}

TEST_CASE("parse rejects malformed configs with anchored messages") {
  auto expect_error = [](Json j, const std::string& needle) {
    try {
      parse_scene(j);
      FAIL_CHECK("expected ConfigError containing '" << needle << "'");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  Json j = base_json();
  j.erase("schema_version");
  expect_error(j, "/schema_version");

  j = base_json();
  j["schema_version"] = 2;
  expect_error(j, "unsupported");

  j = base_json();
  j["media"]["water"].erase("rho_kg_m3");
  expect_error(j, "/media/water/rho_kg_m3");

  j = base_json();
  j["media"]["water"]["rho_kg_m3"] = -1.0;
  expect_error(j, "/media/water");

  j = base_json();
  j["host"]["medium"] = "glass";
  expect_error(j, "/host/medium");

  j = base_json();
  j["source"]["amplitude_pa_m"] = 1.0;
  expect_error(j, "/source/amplitude_pa_m");

  j = base_json();
  j["scatterers"][1].erase("strength_pa_m");
  expect_error(j, "/scatterers/1/strength_pa_m");

  j = base_json();
  j.erase("omega_rad_s");
  expect_error(j, "omega");

  j = base_json();
  j["foldy"] = "adaptive";
  expect_error(j, "/foldy");

  j = base_json();
  j["numerics"]["flux_radii_k0R"] = {100.0};
  expect_error(j, "flux_radii_k0R");

  j = base_json();
  j["tasks"] = Json::array();
  expect_error(j, "/tasks");
}

TEST_CASE("model build rejects bad geometry") {
  Json j = base_json();
  j["source"]["position_m"] = {3.0, 0.0, 0.0};
  SceneConfig cfg = parse_scene(j);
  CHECK_THROWS_AS(build_model(cfg, cfg.omega), ConfigError);
}

TEST_CASE("run_scene writes the report and is deterministic") {
  Json j = base_json();
  j["tasks"] = {"report", "verify:gate", "bounds:5"};
  SceneConfig cfg = parse_scene(j);

  fs::path d1 = temp_dir("a"), d2 = temp_dir("b");
  RunOutcome o1 = run_scene(cfg, d1.string(), true);
  RunOutcome o2 = run_scene(cfg, d2.string(), true);
  CHECK(o1.exit_code == 0);
  CHECK(o2.exit_code == 0);
  CHECK(fs::exists(d1 / "report.json"));
  CHECK(fs::exists(d1 / "cross_sections.csv"));
  CHECK(slurp(d1 / "cross_sections.csv") == slurp(d2 / "cross_sections.csv"));

  Json rep = Json::parse(slurp(d1 / "report.json"));
  CHECK(rep["schema_version"] == 1);
  CHECK(rep["bounds"]["violations"] == 0);
  CHECK(rep["cross_sections"]["sigma_j"].size() == 3);
  CHECK(rep["verifications"].size() == 1);
  CHECK(rep["verifications"][0]["pass"] == true);
  CHECK(rep["provenance"].contains("config_hash"));

  // decomposition holds in the written numbers
  double sigma = rep["cross_sections"]["sigma"].get<double>();
  double sc = rep["cross_sections"]["sigma_c"].get<double>();
  double sd = rep["cross_sections"]["sigma_direct"].get<double>();
  CHECK(sigma == doctest::Approx(sd + sc).epsilon(1e-10));

  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("matched host without scatterers reports the bare cross section") {
  Json j = base_json();
  j["host"]["medium"] = "water";
  j["scatterers"] = Json::array();
  SceneConfig cfg = parse_scene(j);

  fs::path d = temp_dir("bare");
  RunOutcome o = run_scene(cfg, d.string(), true);
  CHECK(o.exit_code == 0);
  Json rep = Json::parse(slurp(d / "report.json"));
  CHECK(rep["cross_sections"]["sigma"].get<double>() ==
        doctest::Approx(4.0 * PI).epsilon(1e-10));
  fs::remove_all(d);
}

TEST_CASE("named verifications dispatch") {
  Json j = base_json();
  SceneConfig cfg = parse_scene(j);
  auto rs = run_verification(cfg, "oscs");
  CHECK(rs.size() >= 1);
  CHECK(rs[0].name == "oscs");
  CHECK_THROWS_AS(run_verification(cfg, "nonsense"), ConfigError);
  // low_frequency needs a sweep block
  CHECK_THROWS_AS(run_verification(cfg, "low_frequency"), ConfigError);
}

TEST_CASE("bounds suite over randomized pattern clusters") {
  auto b = run_bounds_suite(42, 50);
  CHECK(b.trials == 50);
  CHECK(b.violations == 0);
}
