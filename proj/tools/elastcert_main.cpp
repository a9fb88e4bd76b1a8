// Command-line front door: loads a JSON run configuration, dispatches to the
// analysis modules and writes machine-readable reports. Exit codes separate
// "the math said no" from "the run failed":
//   0  success (all requested verdicts positive)
//   2  mathematical refusal (witness found / certificate refused)
//   3  inconclusive (degenerate budget or grid)
//   4  solver failure (iteration budget exhausted)
//   64 configuration error   65 domain error

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "elastcert/certify.hpp"
#include "elastcert/convexity.hpp"
#include "elastcert/energy.hpp"
#include "elastcert/errors.hpp"
#include "elastcert/hull.hpp"
#include "elastcert/json_io.hpp"
#include "elastcert/model_config.hpp"
#include "elastcert/solver.hpp"

namespace ec = elastcert;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kRefusal = 2;
constexpr int kInconclusive = 3;
constexpr int kSolverFailure = 4;
constexpr int kConfigError = 64;
constexpr int kDomainError = 65;

struct Overrides {
  std::optional<long> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ec::ConfigError("cannot open config file: " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw ec::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw ec::ConfigError("config root must be an object");
  return cfg;
}

void check_command_key(const json& cfg, const std::string& expected) {
  if (cfg.contains("command")) {
    if (!cfg["command"].is_string() || cfg["command"].get<std::string>() != expected)
      throw ec::ConfigError("config \"command\" does not match subcommand \"" + expected + "\"");
  }
}

void write_file(const std::string& out_dir, const std::string& name,
                const std::string& content) {
  std::filesystem::create_directories(out_dir);
  const std::string path = out_dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ec::ConfigError("cannot write output file: " + path);
  out << content;
}

double number_or(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ec::ConfigError("\"" + key + "\" must be a number");
  return obj[key].get<double>();
}

long integer_or(const json& obj, const std::string& key, long fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) throw ec::ConfigError("\"" + key + "\" must be an integer");
  return obj[key].get<long>();
}

ec::Vec3 parse_vec3(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() != 3) throw ec::ConfigError(where + ": expected [x, y, z]");
  ec::Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!arr[static_cast<std::size_t>(i)].is_number())
      throw ec::ConfigError(where + ": entries must be numbers");
    v[i] = arr[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

ec::Mat3 parse_mat3(const json& m, const std::string& where) {
  ec::Mat3 out;
  if (m.is_array() && m.size() == 9) {
    for (int i = 0; i < 9; ++i) {
      if (!m[static_cast<std::size_t>(i)].is_number())
        throw ec::ConfigError(where + ": entries must be numbers");
      out.m[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)].get<double>();
    }
    return out;
  }
  if (m.is_array() && m.size() == 3) {
    for (int i = 0; i < 3; ++i) {
      const ec::Vec3 row = parse_vec3(m[static_cast<std::size_t>(i)], where);
      for (int j = 0; j < 3; ++j) out(i, j) = row[j];
    }
    return out;
  }
  throw ec::ConfigError(where + ": expected 9 entries row-major or 3 rows of 3");
}

std::vector<double> parse_grid(const json& cfg) {
  if (!cfg.contains("grid")) return ec::log_grid();
  const json& g = cfg["grid"];
  ec::detail::reject_unknown_keys(g, {"lo", "hi", "points"}, "grid");
  return ec::log_grid(number_or(g, "lo", 1e-3), number_or(g, "hi", 1e3),
                      static_cast<int>(integer_or(g, "points", 61)));
}

ec::HexMesh parse_mesh(const json& cfg) {
  if (!cfg.contains("mesh")) throw ec::ConfigError("missing \"mesh\"");
  const json& m = cfg["mesh"];
  ec::detail::reject_unknown_keys(m, {"dims", "extent"}, "mesh");
  if (!m.contains("dims") || !m["dims"].is_array() || m["dims"].size() != 3)
    throw ec::ConfigError("mesh.dims: expected [nx, ny, nz]");
  std::array<int, 3> dims{};
  for (int i = 0; i < 3; ++i) {
    dims[static_cast<std::size_t>(i)] = m["dims"][static_cast<std::size_t>(i)].get<int>();
    if (dims[static_cast<std::size_t>(i)] < 1)
      throw ec::ConfigError("mesh.dims: cell counts must be positive");
  }
  ec::Vec3 lo = ec::Vec3::zero();
  ec::Vec3 hi = {{1, 1, 1}};
  if (m.contains("extent")) {
    ec::detail::reject_unknown_keys(m["extent"], {"lo", "hi"}, "mesh.extent");
    if (m["extent"].contains("lo")) lo = parse_vec3(m["extent"]["lo"], "mesh.extent.lo");
    if (m["extent"].contains("hi")) hi = parse_vec3(m["extent"]["hi"], "mesh.extent.hi");
  }
  return ec::HexMesh::structured(dims, lo, hi);
}

ec::DirichletData parse_dirichlet(const json& cfg, const ec::HexMesh& mesh) {
  if (!cfg.contains("dirichlet")) throw ec::ConfigError("missing \"dirichlet\"");
  const json& d = cfg["dirichlet"];
  ec::detail::reject_unknown_keys(d, {"affine", "table"}, "dirichlet");
  if (d.contains("affine")) {
    const json& a = d["affine"];
    ec::detail::reject_unknown_keys(a, {"matrix", "offset"}, "dirichlet.affine");
    if (!a.contains("matrix")) throw ec::ConfigError("dirichlet.affine: missing \"matrix\"");
    const ec::Mat3 b = parse_mat3(a["matrix"], "dirichlet.affine.matrix");
    ec::Vec3 c = ec::Vec3::zero();
    if (a.contains("offset")) c = parse_vec3(a["offset"], "dirichlet.affine.offset");
    return ec::DirichletData::affine_map(b, c);
  }
  if (d.contains("table")) {
    const json& t = d["table"];
    if (!t.is_array() || static_cast<long>(t.size()) != mesh.node_count())
      throw ec::ConfigError("dirichlet.table: expected one [x,y,z] per mesh node");
    std::vector<ec::Vec3> values;
    values.reserve(t.size());
    for (const auto& row : t) values.push_back(parse_vec3(row, "dirichlet.table"));
    return ec::DirichletData::node_table(std::move(values));
  }
  throw ec::ConfigError("dirichlet: provide \"affine\" or \"table\"");
}

ec::ConvexityReport run_convexity_evidence(const ec::EnergyModel& model, const json& cfg,
                                           const Overrides& ov) {
  json c = cfg.value("convexity", json::object());
  ec::detail::reject_unknown_keys(c, {"samples", "seed", "tol", "spread", "assume"},
                                  "convexity");
  if (c.value("assume", false)) {
    ec::ConvexityReport supplied;
    supplied.scan = "supplied";
    supplied.verdict = ec::Verdict::Convex;
    supplied.provenance = "supplied by configuration (unverified)";
    return supplied;
  }
  long samples = integer_or(c, "samples", 1000);
  std::uint64_t seed = static_cast<std::uint64_t>(integer_or(c, "seed", 7));
  if (ov.samples) samples = *ov.samples;
  return ec::hessian_psd_scan(model, samples, seed, number_or(c, "tol", 1e-8),
                              number_or(c, "spread", 1.5));
}

// ---------------------------------------------------------------------------

int cmd_check(const json& cfg, const std::string& out_dir, const Overrides& ov) {
  ec::detail::reject_unknown_keys(
      cfg, {"command", "model", "checks", "samples", "seed", "tol", "grid", "det_n", "rank_one"},
      "check config");
  const auto model = ec::model_from_config(cfg.at("model"));
  const long samples = ov.samples ? *ov.samples : integer_or(cfg, "samples", 1000);
  const std::uint64_t seed =
      ov.seed ? *ov.seed : static_cast<std::uint64_t>(integer_or(cfg, "seed", 0));
  const double tol = ov.tol ? *ov.tol : number_or(cfg, "tol", 1e-8);
  const std::vector<double> grid = parse_grid(cfg);
  const int det_n = static_cast<int>(integer_or(cfg, "det_n", 3));

  const auto* det_model = dynamic_cast<const ec::DetFunctionModel*>(model.get());
  const auto* vl_model = dynamic_cast<const ec::ValanisLandelModel*>(model.get());

  std::vector<std::string> checks;
  if (cfg.contains("checks")) {
    if (!cfg["checks"].is_array()) throw ec::ConfigError("\"checks\" must be an array");
    for (const auto& c : cfg["checks"]) {
      if (!c.is_string()) throw ec::ConfigError("\"checks\" entries must be strings");
      checks.push_back(c.get<std::string>());
    }
  } else {
    checks = {"hessian", "monotonicity", "rank_one"};
    if (det_model) checks.insert(checks.begin(), "det");
    if (vl_model) checks.push_back("davis");
  }

  const json rank_cfg = cfg.value("rank_one", json::object());
  ec::detail::reject_unknown_keys(rank_cfg,
                                  {"random_f", "directions", "t_lo", "t_hi", "t_points"},
                                  "rank_one");

  std::vector<ec::ConvexityReport> reports;
  for (const std::string& name : checks) {
    if (name == "det") {
      if (!det_model)
        throw ec::ConfigError("check \"det\" needs a det_function model");
      reports.push_back(
          ec::det_convexity_check(det_model->scalar_function(), det_n, grid));
    } else if (name == "hessian") {
      reports.push_back(ec::hessian_psd_scan(*model, samples, seed, tol));
    } else if (name == "monotonicity") {
      reports.push_back(ec::s2_monotonicity_scan(*model, samples, seed, tol));
    } else if (name == "rank_one") {
      const auto fs = ec::lh_default_f_samples(
          static_cast<int>(integer_or(rank_cfg, "random_f", 50)), seed,
          number_or(rank_cfg, "t_lo", 0.1), number_or(rank_cfg, "t_hi", 2.0),
          static_cast<int>(integer_or(rank_cfg, "t_points", 7)));
      const auto dirs = ec::default_direction_samples(
          static_cast<int>(integer_or(rank_cfg, "directions", 32)));
      reports.push_back(ec::legendre_hadamard_scan(*model, fs, dirs, tol));
    } else if (name == "davis") {
      if (!vl_model) throw ec::ConfigError("check \"davis\" needs a valanis_landel model");
      reports.push_back(ec::davis_check(vl_model->stretch_function(), grid));
    } else {
      throw ec::ConfigError("unknown check \"" + name + "\"");
    }
  }

  bool witness_found = false;
  bool inconclusive = false;
  for (const auto& rep : reports) {
    if (rep.witness.has_value()) witness_found = true;
    // a no-witness rank-one scan is the best possible positive outcome and
    // does not count against the run; empty budgets do
    if (rep.verdict == ec::Verdict::Inconclusive &&
        (rep.scan != "legendre_hadamard" || rep.samples_used == 0))
      inconclusive = true;
  }

  ec::JsonWriter w;
  w.begin_object();
  w.key("command").value(std::string_view("check"));
  w.key("model");
  ec::write_model_info(w, *model);
  w.key("samples").value(samples);
  w.key("seed").value(static_cast<unsigned long long>(seed));
  w.key("tolerance").value(tol);
  w.key("checks").begin_array();
  for (const auto& rep : reports) ec::write_convexity_report(w, rep);
  w.end_array();
  w.end_object();
  write_file(out_dir, "report.json", w.str() + "\n");

  if (witness_found) return kRefusal;
  if (inconclusive) return kInconclusive;
  return kOk;
}

int cmd_certify(const json& cfg, const std::string& out_dir, const Overrides& ov) {
  ec::detail::reject_unknown_keys(cfg,
                                  {"command", "model", "mesh", "dirichlet", "tolerances",
                                   "seed", "perturbations", "max_iterations", "convexity"},
                                  "certify config");
  const auto model = ec::model_from_config(cfg.at("model"));
  const ec::HexMesh mesh = parse_mesh(cfg);
  const ec::DirichletData dirichlet = parse_dirichlet(cfg, mesh);

  const json tols = cfg.value("tolerances", json::object());
  ec::detail::reject_unknown_keys(tols, {"solve", "residual", "pd", "det_floor"}, "tolerances");
  ec::SolveSettings settings;
  settings.tolerance = number_or(tols, "solve", 1e-10);
  settings.det_floor = number_or(tols, "det_floor", 1e-6);
  settings.max_iterations = static_cast<int>(integer_or(cfg, "max_iterations", 30));
  const double tol_residual =
      ov.tol ? *ov.tol : number_or(tols, "residual", 1e-8);
  const double tol_pd = number_or(tols, "pd", 1e-8);

  const std::uint64_t seed =
      ov.seed ? *ov.seed : static_cast<std::uint64_t>(integer_or(cfg, "seed", 1));
  const int perturbations = static_cast<int>(
      ov.samples ? *ov.samples : integer_or(cfg, "perturbations", 100));

  const ec::ConvexityReport evidence = run_convexity_evidence(*model, cfg, Overrides{});
  const ec::SolveResult sol = ec::solve(mesh, *model, dirichlet, settings);

  if (!sol.converged) {
    ec::JsonWriter w;
    w.begin_object();
    w.key("command").value(std::string_view("certify"));
    w.key("model");
    ec::write_model_info(w, *model);
    w.key("solve");
    ec::write_solve_summary(w, sol);
    w.key("certificate").null();
    w.end_object();
    write_file(out_dir, "certificate.json", w.str() + "\n");
    write_file(out_dir, "field.csv", ec::field_to_csv(sol.field));
    return kSolverFailure;
  }

  const ec::Certificate cert =
      ec::certify_global(sol.field, *model, evidence, tol_residual, tol_pd, settings.det_floor);
  const ec::GapReport gap = ec::energy_gap_test(sol.field, *model, perturbations, seed,
                                                1e-2, settings.det_floor);

  ec::JsonWriter w;
  w.begin_object();
  w.key("command").value(std::string_view("certify"));
  w.key("model");
  ec::write_model_info(w, *model);
  w.key("solve");
  ec::write_solve_summary(w, sol);
  w.key("certificate");
  ec::write_certificate(w, cert);
  w.key("energy_gap");
  ec::write_gap_report(w, gap);
  w.end_object();
  write_file(out_dir, "certificate.json", w.str() + "\n");
  write_file(out_dir, "field.csv", ec::field_to_csv(sol.field));

  const double scale = 1.0 + std::abs(gap.base_energy);
  const bool gap_ok =
      gap.min_gap_minus_bound >= -1e-10 * scale && gap.min_bound >= -1e-12 * scale;
  return (cert.status == ec::CertificateStatus::GlobalMinimizer && gap_ok) ? kOk : kRefusal;
}

int cmd_solve(const json& cfg, const std::string& out_dir, const Overrides& ov) {
  ec::detail::reject_unknown_keys(
      cfg, {"command", "model", "mesh", "dirichlet", "tolerances", "max_iterations"},
      "solve config");
  const auto model = ec::model_from_config(cfg.at("model"));
  const ec::HexMesh mesh = parse_mesh(cfg);
  const ec::DirichletData dirichlet = parse_dirichlet(cfg, mesh);

  const json tols = cfg.value("tolerances", json::object());
  ec::detail::reject_unknown_keys(tols, {"solve", "det_floor"}, "tolerances");
  ec::SolveSettings settings;
  settings.tolerance = ov.tol ? *ov.tol : number_or(tols, "solve", 1e-10);
  settings.det_floor = number_or(tols, "det_floor", 1e-6);
  settings.max_iterations = static_cast<int>(integer_or(cfg, "max_iterations", 30));

  const ec::SolveResult sol = ec::solve(mesh, *model, dirichlet, settings);

  ec::JsonWriter w;
  w.begin_object();
  w.key("command").value(std::string_view("solve"));
  w.key("model");
  ec::write_model_info(w, *model);
  w.key("solve");
  ec::write_solve_summary(w, sol);
  w.end_object();
  write_file(out_dir, "solve.json", w.str() + "\n");
  write_file(out_dir, "field.csv", ec::field_to_csv(sol.field));
  return sol.converged ? kOk : kSolverFailure;
}

int cmd_hull(const json& cfg, const std::string& out_dir, const Overrides& ov) {
  ec::detail::reject_unknown_keys(
      cfg, {"command", "model", "path", "starts", "tol", "seed", "convexity"}, "hull config");
  const auto model = ec::model_from_config(cfg.at("model"));

  std::vector<std::pair<double, ec::Mat3>> path;
  if (!cfg.contains("path")) throw ec::ConfigError("missing \"path\"");
  const json& p = cfg["path"];
  ec::detail::reject_unknown_keys(p, {"uniaxial", "explicit"}, "path");
  if (p.contains("uniaxial")) {
    const json& u = p["uniaxial"];
    ec::detail::reject_unknown_keys(u, {"axis", "t_lo", "t_hi", "points"}, "path.uniaxial");
    path = ec::uniaxial_path(number_or(u, "t_lo", 0.1), number_or(u, "t_hi", 2.0),
                             static_cast<int>(integer_or(u, "points", 20)),
                             static_cast<int>(integer_or(u, "axis", 0)));
  } else if (p.contains("explicit")) {
    for (const auto& row : p["explicit"]) {
      ec::detail::reject_unknown_keys(row, {"t", "matrix"}, "path.explicit");
      if (!row.contains("matrix")) throw ec::ConfigError("path.explicit: missing \"matrix\"");
      path.emplace_back(number_or(row, "t", static_cast<double>(path.size())),
                        parse_mat3(row["matrix"], "path.explicit.matrix"));
    }
  } else {
    throw ec::ConfigError("path: provide \"uniaxial\" or \"explicit\"");
  }

  ec::HullSettings settings;
  settings.starts = static_cast<int>(integer_or(cfg, "starts", 16));
  settings.tol = ov.tol ? *ov.tol : number_or(cfg, "tol", 1e-9);
  settings.seed = ov.seed ? *ov.seed : static_cast<std::uint64_t>(integer_or(cfg, "seed", 0));

  const ec::ConvexityReport evidence = run_convexity_evidence(*model, cfg, ov);
  if (evidence.verdict != ec::Verdict::Convex) {
    ec::JsonWriter w;
    w.begin_object();
    w.key("command").value(std::string_view("hull"));
    w.key("model");
    ec::write_model_info(w, *model);
    w.key("convexity_evidence");
    ec::write_convexity_report(w, evidence);
    w.key("rows").null();
    w.end_object();
    write_file(out_dir, "summary.json", w.str() + "\n");
    return kRefusal;  // no CSV: the hull formula does not apply
  }

  const auto rows = ec::hull_sweep(*model, path, evidence, settings);

  double max_gap = 0.0;
  bool all_converged = true;
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      all_converged = false;
      continue;
    }
    max_gap = std::max(max_gap, row.gap);
    all_converged = all_converged && row.converged;
  }

  ec::JsonWriter w;
  w.begin_object();
  w.key("command").value(std::string_view("hull"));
  w.key("model");
  ec::write_model_info(w, *model);
  w.key("convexity_evidence");
  ec::write_convexity_report(w, evidence);
  w.key("starts").value(static_cast<long>(settings.starts));
  w.key("tol").value(settings.tol);
  w.key("seed").value(static_cast<unsigned long long>(settings.seed));
  w.key("points").value(static_cast<long>(rows.size()));
  w.key("max_gap").value(max_gap);
  w.key("all_converged").value(all_converged);
  w.key("rows").begin_array();
  for (const auto& row : rows) {
    w.begin_object();
    w.key("t").value(row.t);
    w.key("w").value(row.w);
    w.key("qw").value(row.qw);
    w.key("gap").value(row.gap);
    w.key("converged").value(row.converged);
    if (!row.error.empty()) w.key("error").value(std::string_view(row.error));
    w.end_object();
  }
  w.end_array();
  w.end_object();
  write_file(out_dir, "summary.json", w.str() + "\n");
  write_file(out_dir, "sweep.csv", ec::sweep_to_csv(rows));
  return kOk;
}

int cmd_linearize(const json& cfg, const std::string& out_dir, const Overrides&) {
  ec::detail::reject_unknown_keys(cfg, {"command", "model"}, "linearize config");
  const auto model = ec::model_from_config(cfg.at("model"));
  const auto* nh = dynamic_cast<const ec::NeoHookeModel*>(model.get());
  if (!nh)
    throw ec::ConfigError("linearize needs a neo_hooke model, got \"" + model->name() + "\"");

  ec::JsonWriter w;
  w.begin_object();
  w.key("command").value(std::string_view("linearize"));
  w.key("model");
  ec::write_model_info(w, *model);
  w.key("response");
  ec::write_linearized_response(w, ec::linearized_response(*nh));
  w.end_object();
  write_file(out_dir, "linearized.json", w.str() + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convexity checks, global-minimizer certificates and quasiconvex "
               "hulls for hyperelastic energies in the right Cauchy-Green tensor"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  Overrides ov;
  long samples_flag = -1;
  long long seed_flag = -1;
  double tol_flag = -1.0;

  const std::vector<std::string> names = {"check", "certify", "solve", "hull", "linearize"};
  for (const std::string& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (default: current)");
    sub->add_option("--samples", samples_flag, "override sample/perturbation budget");
    sub->add_option("--seed", seed_flag, "override the run seed");
    sub->add_option("--tol", tol_flag, "override the main tolerance");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;  // --help is not a usage error
  }

  if (samples_flag >= 0) ov.samples = samples_flag;
  if (seed_flag >= 0) ov.seed = static_cast<std::uint64_t>(seed_flag);
  if (tol_flag >= 0.0) ov.tol = tol_flag;

  try {
    const json cfg = load_config(config_path);
    for (const std::string& name : names) {
      if (app.got_subcommand(name)) {
        check_command_key(cfg, name);
        if (name == "check") return cmd_check(cfg, out_dir, ov);
        if (name == "certify") return cmd_certify(cfg, out_dir, ov);
        if (name == "solve") return cmd_solve(cfg, out_dir, ov);
        if (name == "hull") return cmd_hull(cfg, out_dir, ov);
        if (name == "linearize") return cmd_linearize(cfg, out_dir, ov);
      }
    }
    return kConfigError;
  } catch (const ec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ec::NotConvexEvidence& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kRefusal;
  } catch (const ec::NoConvergence& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const ec::Error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  }
}
