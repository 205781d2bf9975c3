#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef CLUSCAT_BIN
#error "CLUSCAT_BIN must point at the cluscat executable"
#endif

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(CLUSCAT_BIN) + " " + args;
  int rc = std::system(cmd.c_str());
#ifdef _WIN32
  return rc;
#else
  return WEXITSTATUS(rc);
#endif
}

fs::path write_config(const std::string& tag, const std::string& body) {
  fs::path p = fs::temp_directory_path() / ("cluscat_cli_" + tag + ".json");
  std::ofstream out(p);
  out << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kConfig = R"({
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
    {"position_m": [2.0, 0.0, 0.3], "strength_pa_m": {"re": 0.8, "im": -0.1}}
  ],
  "omega_rad_s": 1.0
})";

}  // namespace

TEST_CASE("run twice produces byte-identical cross sections") {
  fs::path cfg = write_config("run", kConfig);
  fs::path d1 = fs::temp_directory_path() / "cluscat_cli_out1";
  fs::path d2 = fs::temp_directory_path() / "cluscat_cli_out2";
  fs::remove_all(d1);
  fs::remove_all(d2);

  CHECK(run("--quiet run " + cfg.string() + " --out " + d1.string()) == 0);
  CHECK(run("--quiet run " + cfg.string() + " --out " + d2.string()) == 0);
  REQUIRE(fs::exists(d1 / "cross_sections.csv"));
  CHECK(slurp(d1 / "cross_sections.csv") == slurp(d2 / "cross_sections.csv"));
  CHECK(fs::exists(d1 / "report.json"));

  fs::remove_all(d1);
  fs::remove_all(d2);
  fs::remove(cfg);
}

TEST_CASE("verify subcommand passes on a lossless scene") {
  fs::path cfg = write_config("verify", kConfig);
  CHECK(run("--quiet verify " + cfg.string() + " --name oscs") == 0);
  CHECK(run("--quiet verify " + cfg.string() + " --name gate") == 0);
  fs::remove(cfg);
}

TEST_CASE("bad config exits with code 2") {
  fs::path cfg = write_config("bad", R"({"schema_version": 1, "media": {}})");
  fs::path d = fs::temp_directory_path() / "cluscat_cli_bad";
  CHECK(run("--quiet run " + cfg.string() + " --out " + d.string()) == 2);
  CHECK(run("--quiet verify " + cfg.string() + " --name oscs") == 2);
  fs::remove(cfg);
  fs::remove_all(d);
}

TEST_CASE("missing file exits with code 2") {
  CHECK(run("--quiet verify /nonexistent.json --name oscs") == 2);
}
