#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cluscat/cluster.hpp"
#include "cluscat/crosssec.hpp"
#include "cluscat/theorems.hpp"

namespace cluscat {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct OmegaSweep {
  double from = 0.0;
  double to = 0.0;
  int points = 0;
};

struct SceneConfig {
  int schema_version = 1;
  std::map<std::string, Medium> media;
  std::string exterior_medium_name;
  std::string host_medium_name;
  HostSphere host;
  PointSource source;
  std::vector<PointScatterer> scatterers;
  bool foldy_self_consistent = false;
  double omega = 0.0;
  std::optional<OmegaSweep> sweep;
  int truncation_order = 0;   // 0: automatic
  int pattern_n_theta = 0;    // 0: automatic
  std::vector<double> flux_radii_k0R{100.0, 200.0, 400.0};
  VerifyOptions verify;
  std::uint64_t seed = 42;
  std::vector<std::string> tasks{"report"};
  Json echo;  // effective configuration, defaults filled in
};

namespace detail {

inline std::string at_path(const std::string& path, const std::string& msg) {
  return "config error at " + path + ": " + msg;
}

inline double num_at(const Json& j, const std::string& path,
                     const std::string& key, double def,
                     bool required = false) {
  if (!j.contains(key)) {
    if (required) throw ConfigError(at_path(path + "/" + key, "missing"));
    return def;
  }
  if (!j[key].is_number())
    throw ConfigError(at_path(path + "/" + key, "expected a number"));
  return j[key].get<double>();
}

inline Complex complex_at(const Json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im"))
    throw ConfigError(at_path(path, "expected {re, im}"));
  return {j["re"].get<double>(), j["im"].get<double>()};
}

inline Vec3 vec3_at(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(at_path(path, "expected [x, y, z]"));
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline Json json_complex(Complex c) {
  return Json{{"re", c.real()}, {"im", c.imag()}};
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

inline SceneConfig parse_scene(const Json& j) {
  SceneConfig cfg;
  if (!j.is_object()) throw ConfigError("config error at /: expected an object");
  if (!j.contains("schema_version"))
    throw ConfigError("config error at /schema_version: missing");
  cfg.schema_version = j["schema_version"].get<int>();
  if (cfg.schema_version != 1)
    throw ConfigError("config error at /schema_version: unsupported version " +
                      std::to_string(cfg.schema_version));

  if (!j.contains("media") || !j["media"].is_object())
    throw ConfigError("config error at /media: expected an object");
  for (const auto& [name, m] : j["media"].items()) {
    std::string p = "/media/" + name;
    Medium med;
    med.rho = detail::num_at(m, p, "rho_kg_m3", 0.0, true);
    med.gamma = detail::num_at(m, p, "gamma_pa_inv", 0.0, true);
    med.delta = detail::num_at(m, p, "delta_s", 0.0);
    try {
      med.validate();
    } catch (const std::exception& e) {
      throw ConfigError(detail::at_path(p, e.what()));
    }
    cfg.media[name] = med;
  }

  auto medium_ref = [&](const std::string& name, const std::string& path) {
    if (!cfg.media.count(name))
      throw ConfigError(detail::at_path(path, "unknown medium '" + name + "'"));
    return name;
  };

  if (!j.contains("exterior_medium"))
    throw ConfigError("config error at /exterior_medium: missing");
  cfg.exterior_medium_name =
      medium_ref(j["exterior_medium"].get<std::string>(), "/exterior_medium");

  if (!j.contains("host") || !j["host"].is_object())
    throw ConfigError("config error at /host: expected an object");
  cfg.host.center = detail::vec3_at(j["host"]["center_m"], "/host/center_m");
  cfg.host.radius = detail::num_at(j["host"], "/host", "radius_m", 0.0, true);
  if (!j["host"].contains("medium"))
    throw ConfigError("config error at /host/medium: missing");
  cfg.host_medium_name =
      medium_ref(j["host"]["medium"].get<std::string>(), "/host/medium");

  if (!j.contains("source") || !j["source"].is_object())
    throw ConfigError("config error at /source: expected an object");
  cfg.source.position =
      detail::vec3_at(j["source"]["position_m"], "/source/position_m");
  if (!j["source"].contains("amplitude_pa_m"))
    throw ConfigError("config error at /source/amplitude_pa_m: missing");
  cfg.source.amplitude = detail::complex_at(j["source"]["amplitude_pa_m"],
                                            "/source/amplitude_pa_m");

  if (j.contains("scatterers")) {
    if (!j["scatterers"].is_array())
      throw ConfigError("config error at /scatterers: expected an array");
    int i = 0;
    for (const auto& s : j["scatterers"]) {
      std::string p = "/scatterers/" + std::to_string(i++);
      PointScatterer sc;
      sc.position = detail::vec3_at(s["position_m"], p + "/position_m");
      if (!s.contains("strength_pa_m"))
        throw ConfigError(detail::at_path(p + "/strength_pa_m", "missing"));
      sc.strength = detail::complex_at(s["strength_pa_m"], p + "/strength_pa_m");
      if (s.contains("monopole_coefficient_m")) {
        sc.has_monopole = true;
        sc.monopole_coefficient = detail::complex_at(
            s["monopole_coefficient_m"], p + "/monopole_coefficient_m");
      }
      cfg.scatterers.push_back(sc);
    }
  }

  if (j.contains("foldy")) {
    std::string mode = j["foldy"].get<std::string>();
    if (mode == "self_consistent")
      cfg.foldy_self_consistent = true;
    else if (mode != "fixed")
      throw ConfigError(
          "config error at /foldy: expected 'fixed' or 'self_consistent'");
  }

  if (j.contains("omega_rad_s"))
    cfg.omega = j["omega_rad_s"].get<double>();
  if (j.contains("omega_sweep")) {
    const auto& s = j["omega_sweep"];
    OmegaSweep sw;
    sw.from = detail::num_at(s, "/omega_sweep", "from_rad_s", 0.0, true);
    sw.to = detail::num_at(s, "/omega_sweep", "to_rad_s", 0.0, true);
    sw.points = static_cast<int>(
        detail::num_at(s, "/omega_sweep", "points", 0.0, true));
    if (sw.points < 2 || !(sw.from > 0.0) || !(sw.to > 0.0))
      throw ConfigError(
          "config error at /omega_sweep: need points >= 2 and positive range");
    cfg.sweep = sw;
  }
  if (!(cfg.omega > 0.0) && !cfg.sweep)
    throw ConfigError(
        "config error at /omega_rad_s: need omega_rad_s or omega_sweep");
  if (!(cfg.omega > 0.0) && cfg.sweep) cfg.omega = cfg.sweep->to;

  if (j.contains("numerics")) {
    const auto& n = j["numerics"];
    cfg.truncation_order = static_cast<int>(
        detail::num_at(n, "/numerics", "truncation_order", 0.0));
    cfg.pattern_n_theta = static_cast<int>(
        detail::num_at(n, "/numerics", "pattern_n_theta", 0.0));
    cfg.verify.eps_factor =
        detail::num_at(n, "/numerics", "epsilon_factor", cfg.verify.eps_factor);
    cfg.seed = static_cast<std::uint64_t>(
        detail::num_at(n, "/numerics", "seed", 42.0));
    if (n.contains("flux_radii_k0R")) {
      cfg.flux_radii_k0R.clear();
      for (const auto& r : n["flux_radii_k0R"])
        cfg.flux_radii_k0R.push_back(r.get<double>());
      if (cfg.flux_radii_k0R.size() < 2)
        throw ConfigError(
            "config error at /numerics/flux_radii_k0R: need >= 2 radii");
    }
    if (n.contains("tolerances")) {
      const auto& t = n["tolerances"];
      cfg.verify.tol_identity =
          detail::num_at(t, "/numerics/tolerances", "identity",
                         cfg.verify.tol_identity);
      cfg.verify.tol_closed = detail::num_at(
          t, "/numerics/tolerances", "closed_form", cfg.verify.tol_closed);
      cfg.verify.tol_eps =
          detail::num_at(t, "/numerics/tolerances", "eps", cfg.verify.tol_eps);
      cfg.verify.tol_oscs = detail::num_at(t, "/numerics/tolerances", "oscs",
                                           cfg.verify.tol_oscs);
    }
  }

  if (j.contains("tasks")) {
    cfg.tasks.clear();
    for (const auto& t : j["tasks"]) cfg.tasks.push_back(t.get<std::string>());
    if (cfg.tasks.empty())
      throw ConfigError("config error at /tasks: expected a non-empty array");
  }

  // effective configuration echo
  Json e;
  e["schema_version"] = cfg.schema_version;
  e["media"] = Json::object();
  for (const auto& [name, m] : cfg.media)
    e["media"][name] = Json{{"rho_kg_m3", m.rho},
                            {"gamma_pa_inv", m.gamma},
                            {"delta_s", m.delta}};
  e["exterior_medium"] = cfg.exterior_medium_name;
  e["host"] = Json{{"center_m", {cfg.host.center.x, cfg.host.center.y,
                                 cfg.host.center.z}},
                   {"radius_m", cfg.host.radius},
                   {"medium", cfg.host_medium_name}};
  e["source"] = Json{{"position_m", {cfg.source.position.x,
                                     cfg.source.position.y,
                                     cfg.source.position.z}},
                     {"amplitude_pa_m",
                      detail::json_complex(cfg.source.amplitude)}};
  e["scatterers"] = Json::array();
  for (const auto& sc : cfg.scatterers) {
    Json s{{"position_m", {sc.position.x, sc.position.y, sc.position.z}},
           {"strength_pa_m", detail::json_complex(sc.strength)}};
    if (sc.has_monopole)
      s["monopole_coefficient_m"] =
          detail::json_complex(sc.monopole_coefficient);
    e["scatterers"].push_back(s);
  }
  e["foldy"] = cfg.foldy_self_consistent ? "self_consistent" : "fixed";
  e["omega_rad_s"] = cfg.omega;
  if (cfg.sweep)
    e["omega_sweep"] = Json{{"from_rad_s", cfg.sweep->from},
                            {"to_rad_s", cfg.sweep->to},
                            {"points", cfg.sweep->points}};
  e["numerics"] =
      Json{{"truncation_order", cfg.truncation_order},
           {"pattern_n_theta", cfg.pattern_n_theta},
           {"flux_radii_k0R", cfg.flux_radii_k0R},
           {"epsilon_factor", cfg.verify.eps_factor},
           {"seed", cfg.seed},
           {"tolerances", Json{{"identity", cfg.verify.tol_identity},
                               {"closed_form", cfg.verify.tol_closed},
                               {"eps", cfg.verify.tol_eps},
                               {"oscs", cfg.verify.tol_oscs}}}};
  e["tasks"] = cfg.tasks;
  cfg.echo = e;
  return cfg;
}

inline SceneConfig load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config error: cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("config error in '" + path + "': " + e.what());
  }
  return parse_scene(j);
}

inline ClusterModel build_model(const SceneConfig& cfg, double omega) {
  ClusterModel m;
  m.host = cfg.host;
  m.host_medium = cfg.media.at(cfg.host_medium_name);
  m.exterior_medium = cfg.media.at(cfg.exterior_medium_name);
  m.source = cfg.source;
  m.scatterers = cfg.scatterers;
  m.omega = omega;
  try {
    m.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }
  if (cfg.foldy_self_consistent) {
    auto A = foldy_strengths(m, FoldyMode::SelfConsistent);
    for (size_t i = 0; i < A.size(); ++i) m.scatterers[i].strength = A[i];
  }
  return m;
}

/// Pattern grid and truncation for a scene at the given frequency.
inline Assembly assemble_scene(const SceneConfig& cfg, double omega,
                               SphericalGrid& grid_storage) {
  ClusterModel m = build_model(cfg, omega);
  DerivedMedium hdm = derive(m.host_medium, omega);
  DerivedMedium edm = derive(m.exterior_medium, omega);
  int L = (cfg.truncation_order > 0)
              ? cfg.truncation_order
              : default_truncation(hdm, edm, m.host.radius);
  int nt = (cfg.pattern_n_theta > 0) ? cfg.pattern_n_theta
                                     : std::clamp(2 * L + 8, 32, 200);
  grid_storage = sphere_grid(nt, 2 * nt);
  return assemble(m, grid_storage, L);
}

inline Json result_to_json(const VerificationResult& r) {
  Json j;
  j["name"] = r.name;
  j["lhs"] = detail::json_complex(r.lhs);
  j["rhs"] = detail::json_complex(r.rhs);
  j["abs_residual"] = r.abs_residual;
  j["rel_residual"] = r.rel_residual;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  j["exploratory"] = r.exploratory;
  j["inconclusive"] = r.inconclusive;
  if (!r.detail.empty()) j["detail"] = r.detail;
  if (!r.convergence.empty()) {
    Json c = Json::array();
    for (const auto& [p, res] : r.convergence) c.push_back({p, res});
    j["convergence"] = c;
  }
  return j;
}

/// Randomized free-space pattern clusters for the inequality suite.
struct BoundsSuiteResult {
  int trials = 0;
  int violations = 0;
  std::string first_violation;
};

inline BoundsSuiteResult run_bounds_suite(std::uint64_t seed, int trials) {
  BoundsSuiteResult out;
  out.trials = trials;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nd(2, 6);
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  const double k0 = 1.0;
  SphericalGrid grid = sphere_grid(32, 64);

  for (int t = 0; t < trials; ++t) {
    int n = nd(rng);
    std::vector<FarFieldPattern> pats;
    for (int i = 0; i < n; ++i) {
      Vec3 b{pos(rng), pos(rng), pos(rng)};
      Complex A{amp(rng), amp(rng)};
      if (std::abs(A) < 1e-3) A += 0.1;  // keep sigma_j away from zero
      pats.push_back(point_source_pattern(A, b, k0, grid));
    }
    auto rep = cross_section_report(pats);
    auto v = check_bounds(pats, rep, 1e-11);
    if (!v.all_ok) {
      ++out.violations;
      if (out.first_violation.empty())
        out.first_violation = "trial " + std::to_string(t);
    }
  }
  return out;
}

/// Dispatches a named verification on the scene.
inline std::vector<VerificationResult> run_verification(
    const SceneConfig& cfg, const std::string& name) {
  if (name == "low_frequency") {
    if (!cfg.sweep)
      throw ConfigError(
          "config error at /omega_sweep: required by verify:low_frequency");
    std::vector<double> omegas;
    for (int i = 0; i < cfg.sweep->points; ++i) {
      double t = static_cast<double>(i) / (cfg.sweep->points - 1);
      omegas.push_back(cfg.sweep->from *
                       std::pow(cfg.sweep->to / cfg.sweep->from, t));
    }
    SweepResult sw = low_frequency_sweep(
        build_model(cfg, cfg.omega), omegas, cfg.verify,
        cfg.foldy_self_consistent ? FoldyMode::SelfConsistent
                                  : FoldyMode::Fixed);
    VerificationResult r;
    r.name = "low_frequency";
    r.pass = sw.host_lossy ? sw.monotone_pass : sw.lossless_pass;
    r.tolerance = cfg.verify.tol_oscs;
    for (const auto& row : sw.rows)
      r.convergence.push_back(
          {row.omega, sw.host_lossy ? std::abs(row.host_flux.imag())
                                    : row.lossless_residual});
    r.detail = sw.host_lossy ? "lossy: |Im host flux| vs omega"
                             : "lossless: interaction-flux residual vs omega";
    return {r};
  }

  SphericalGrid grid;
  Assembly as = assemble_scene(cfg, cfg.omega, grid);

  if (name == "flux_limit") {
    std::vector<double> radii;
    for (double k0R : cfg.flux_radii_k0R) radii.push_back(k0R / as.k0());
    return {verify_flux_limit(as, radii, cfg.verify)};
  }
  if (name == "host_surface") return verify_host_surface(as, cfg.verify);
  if (name == "oscs") return verify_oscs(as, cfg.verify);
  if (name == "pointlike_overall")
    return {verify_pointlike_overall(as, cfg.verify)};
  if (name == "sign") return {check_interaction_sign(as, cfg.verify)};
  if (name == "gate") {
    double need = as.model.host.radius;
    for (const auto& sc : as.model.scatterers)
      need = std::max(need, (sc.position - as.model.host.center).norm());
    return {flux_radius_gate(as, 2.0 * need, 4.0 * need, cfg.verify)};
  }
  throw ConfigError("config error: unknown verification '" + name + "'");
}

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write '" + p.string() + "'");
  out << s;
}

}  // namespace detail

struct RunOutcome {
  int exit_code = 0;       // 0 pass, 3 verification failure / non-convergence
  std::string message;
};

/// Executes every task of the scene and writes report.json plus CSV files.
inline RunOutcome run_scene(const SceneConfig& cfg, const std::string& outdir,
                            bool quiet = false) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);

  RunOutcome out;
  Json report;
  report["schema_version"] = 1;
  report["config"] = cfg.echo;
  report["timestamp"] = "";  // filled below, excluded from determinism
  {
    std::ostringstream ts;
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    report["timestamp"] = buf;
  }
  report["provenance"] =
      Json{{"config_hash", detail::fnv1a(cfg.echo.dump())}};

  std::vector<VerificationResult> results;
  std::string csv;

  for (const auto& task : cfg.tasks) {
    if (task == "report" || task == "sweep") continue;  // handled below
    if (task.rfind("bounds:", 0) == 0) {
      int trials = std::stoi(task.substr(7));
      auto b = run_bounds_suite(cfg.seed, trials);
      report["bounds"] = Json{{"trials", b.trials},
                              {"violations", b.violations},
                              {"seed", cfg.seed}};
      if (b.violations > 0) {
        out.exit_code = 3;
        out.message = "bounds suite: " + std::to_string(b.violations) +
                      " violations (" + b.first_violation + ")";
      }
      continue;
    }
    if (task.rfind("verify:", 0) == 0) {
      auto rs = run_verification(cfg, task.substr(7));
      results.insert(results.end(), rs.begin(), rs.end());
      continue;
    }
    throw ConfigError("config error at /tasks: unknown task '" + task + "'");
  }

  bool want_report =
      std::find(cfg.tasks.begin(), cfg.tasks.end(), "report") != cfg.tasks.end();
  if (want_report) {
    SphericalGrid grid;
    Assembly as = assemble_scene(cfg, cfg.omega, grid);
    auto rep = cross_section_report(as.patterns);

    report["provenance"]["truncation_order"] = as.L;
    report["provenance"]["pattern_grid"] =
        Json{{"n_theta", grid.n_theta}, {"n_phi", grid.n_phi}};

    Json cs;
    cs["sigma"] = rep.sigma;
    cs["sigma_direct"] = rep.sigma_direct;
    cs["sigma_c"] = rep.sigma_c;
    cs["sigma_j"] = rep.sigma_j;
    cs["ratio_j"] = rep.ratio_j;
    cs["ratio_c"] = rep.ratio_c;
    cs["ratio_direct"] = rep.ratio_direct;
    report["cross_sections"] = cs;

    std::ostringstream s;
    s << "index,kind,sigma,ratio\n";
    for (size_t i = 0; i < rep.sigma_j.size(); ++i) {
      bool host = (i == as.host_index());
      s << i << "," << (host ? "host" : "scatterer") << ","
        << detail::fmt(rep.sigma_j[i]) << "," << detail::fmt(rep.ratio_j[i])
        << "\n";
    }
    s << ",overall," << detail::fmt(rep.sigma) << "," << detail::fmt(1.0)
      << "\n";
    s << ",interaction," << detail::fmt(rep.sigma_c) << ","
      << detail::fmt(rep.ratio_c) << "\n";
    csv = s.str();
  }

  bool want_sweep =
      std::find(cfg.tasks.begin(), cfg.tasks.end(), "sweep") != cfg.tasks.end();
  if (want_sweep) {
    if (!cfg.sweep)
      throw ConfigError("config error at /omega_sweep: required by task sweep");
    std::vector<double> omegas;
    for (int i = 0; i < cfg.sweep->points; ++i) {
      double t = static_cast<double>(i) / (cfg.sweep->points - 1);
      omegas.push_back(cfg.sweep->from *
                       std::pow(cfg.sweep->to / cfg.sweep->from, t));
    }
    SweepResult sw = low_frequency_sweep(
        build_model(cfg, cfg.omega), omegas, cfg.verify,
        cfg.foldy_self_consistent ? FoldyMode::SelfConsistent
                                  : FoldyMode::Fixed);
    std::ostringstream s;
    s << "omega,sigma_c,zeta0,host_flux_re,host_flux_im,enclosing_flux,"
         "lossless_residual\n";
    for (const auto& r : sw.rows)
      s << detail::fmt(r.omega) << "," << detail::fmt(r.sigma_c) << ","
        << detail::fmt(r.zeta0) << "," << detail::fmt(r.host_flux.real()) << ","
        << detail::fmt(r.host_flux.imag()) << ","
        << detail::fmt(r.enclosing_flux) << ","
        << detail::fmt(r.lossless_residual) << "\n";
    detail::write_file(fs::path(outdir) / "sweep.csv", s.str());
    report["sweep"] = Json{{"host_lossy", sw.host_lossy},
                           {"monotone_pass", sw.monotone_pass},
                           {"lossless_pass", sw.lossless_pass}};
    bool pass = sw.host_lossy ? sw.monotone_pass : sw.lossless_pass;
    if (!pass && out.exit_code == 0) {
      out.exit_code = 3;
      out.message = "sweep: trend verdict failed";
    }
  }

  Json jresults = Json::array();
  for (const auto& r : results) {
    jresults.push_back(result_to_json(r));
    if (!r.exploratory && !r.pass && out.exit_code == 0) {
      out.exit_code = 3;
      out.message = "verification failed: " + r.name +
                    (r.inconclusive ? " (inconclusive)" : "");
    }
    if (!r.convergence.empty()) {
      std::ostringstream s;
      s << "parameter,residual\n";
      for (const auto& [p, res] : r.convergence)
        s << detail::fmt(p) << "," << detail::fmt(res) << "\n";
      detail::write_file(fs::path(outdir) / ("convergence_" + r.name + ".csv"),
                         s.str());
    }
  }
  report["verifications"] = jresults;

  if (!csv.empty())
    detail::write_file(fs::path(outdir) / "cross_sections.csv", csv);
  detail::write_file(fs::path(outdir) / "report.json", report.dump(2) + "\n");

  if (!quiet && !out.message.empty()) std::fprintf(stderr, "%s\n", out.message.c_str());
  return out;
}

}  // namespace cluscat
