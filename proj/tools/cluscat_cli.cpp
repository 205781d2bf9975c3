#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cluscat/scene.hpp"

namespace {

int run_cmd(const std::string& config, const std::string& outdir, bool quiet) {
  cluscat::SceneConfig cfg = cluscat::load_scene(config);
  cluscat::RunOutcome out = cluscat::run_scene(cfg, outdir, quiet);
  return out.exit_code;
}

int verify_cmd(const std::string& config, const std::string& name, bool quiet) {
  cluscat::SceneConfig cfg = cluscat::load_scene(config);
  auto results = cluscat::run_verification(cfg, name);
  int rc = 0;
  for (const auto& r : results) {
    if (!quiet)
      std::printf("%s: %s (rel residual %.3e, tol %.1e)%s\n", r.name.c_str(),
                  r.pass ? "pass" : "FAIL", r.rel_residual, r.tolerance,
                  r.exploratory ? " [exploratory]" : "");
    if (!r.exploratory && !r.pass) rc = 3;
  }
  return rc;
}

int sweep_cmd(const std::string& config, const std::string& param, double from,
              double to, int points, const std::string& outdir, bool quiet) {
  if (param != "omega")
    throw cluscat::ConfigError("config error: only --param omega is supported");
  cluscat::SceneConfig cfg = cluscat::load_scene(config);
  cfg.sweep = cluscat::OmegaSweep{from, to, points};
  if (from <= 0.0 || to <= 0.0 || points < 2)
    throw cluscat::ConfigError(
        "config error: sweep needs positive range and points >= 2");
  cfg.tasks = {"sweep"};
  cluscat::RunOutcome out = cluscat::run_scene(cfg, outdir, quiet);
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acoustic cluster scattering simulator"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress progress output");

  std::string config, outdir = ".", name, param = "omega";
  double from = 0.0, to = 0.0;
  int points = 0;

  auto* run = app.add_subcommand("run", "run the tasks of a scene config");
  run->add_option("config", config, "scene config JSON")->required();
  run->add_option("--out", outdir, "output directory")->required();

  auto* verify = app.add_subcommand("verify", "run one named verification");
  verify->add_option("config", config, "scene config JSON")->required();
  verify->add_option("--name", name, "verification id")->required();

  auto* sweep = app.add_subcommand("sweep", "frequency sweep");
  sweep->add_option("config", config, "scene config JSON")->required();
  sweep->add_option("--param", param, "sweep parameter (omega)");
  sweep->add_option("--from", from, "start value")->required();
  sweep->add_option("--to", to, "end value")->required();
  sweep->add_option("--points", points, "number of points")->required();
  sweep->add_option("--out", outdir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_cmd(config, outdir, quiet);
    if (verify->parsed()) return verify_cmd(config, name, quiet);
    if (sweep->parsed())
      return sweep_cmd(config, param, from, to, points, outdir, quiet);
  } catch (const cluscat::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
