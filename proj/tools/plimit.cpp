// Command-line front end. Every subcommand reads JSON/CSV inputs, writes
// CSV/JSON outputs, and on failure prints one JSON error record to stderr.
//
// Exit status: 0 success, 1 suite criteria failed, 2 usage error,
// 3 invalid input, 4 numerical failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "plimit/error.hpp"
#include "plimit/experiments.hpp"
#include "plimit/io.hpp"
#include "plimit/limitdyn.hpp"
#include "plimit/mesh.hpp"
#include "plimit/mosco.hpp"
#include "plimit/penergy.hpp"
#include "plimit/proxflow.hpp"
#include "plimit/suite.hpp"
#include "plimit/transport.hpp"

namespace fs = std::filesystem;
using plimit::io::json;

namespace {

enum Exit { kOk = 0, kCriteriaFailed = 1, kUsage = 2, kInput = 3, kNumerical = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string log_level = "warn";
};

Globals globals;

// Relative output paths land under --out-dir.
fs::path out_path(const std::string& p) {
  fs::path path(p);
  if (globals.out_dir.empty() || path.is_absolute()) return path;
  return fs::path(globals.out_dir) / path;
}

fs::path in_path(const std::string& p) {
  if (!fs::exists(p)) throw plimit::InvalidArgument(fmt::format("file not found: {}", p));
  return p;
}

void prepare_output(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_json(const std::string& p, const json& j) {
  const fs::path path = out_path(p);
  prepare_output(path);
  plimit::io::write_json(path, j);
  spdlog::info("wrote {}", path.string());
}

plimit::DomainMesh load_mesh(const std::string& p) {
  return plimit::io::mesh_from_json(plimit::io::read_json(in_path(p)));
}

plimit::GeodesicTable load_geo(const std::string& p, const plimit::DomainMesh* mesh) {
  if (!p.empty()) return plimit::io::geo_from_json(plimit::io::read_json(in_path(p)));
  if (mesh == nullptr) throw UsageError("--geo is required");
  return plimit::boundary_pairwise_distances(*mesh);
}

plimit::PEnergyConfig penergy_config(double p) {
  plimit::PEnergyConfig cfg;
  cfg.p = p;
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------- mesh

struct MeshArgs {
  std::string shape;
  int n = 0;
  double h = 0.0;
  double rx = 1.0, ry = 1.0;
  std::string out, geo;
};

int cmd_mesh(const MeshArgs& a) {
  plimit::DomainMesh mesh;
  if (a.shape == "interval") {
    if (a.n < 1) throw UsageError("interval needs --n >= 1");
    mesh = plimit::build_interval_mesh(a.n);
  } else if (a.shape == "square") {
    if (!(a.h > 0.0)) throw UsageError("square needs --h > 0");
    const auto v = plimit::unit_square();
    mesh = plimit::build_polygon_mesh(v, a.h);
  } else {
    if (a.n < 3 || !(a.h > 0.0)) throw UsageError("polygon needs --n >= 3 and --h > 0");
    const auto v = plimit::inscribed_polygon(a.n, a.rx, a.ry);
    mesh = plimit::build_polygon_mesh(v, a.h);
  }
  spdlog::info("mesh: {} nodes, {} elements, {} boundary nodes", mesh.node_count(),
               mesh.element_count(), mesh.boundary_count());
  write_json(a.out, plimit::io::mesh_to_json(mesh));
  if (!a.geo.empty()) write_json(a.geo, plimit::io::geo_to_json(plimit::boundary_pairwise_distances(mesh)));
  return kOk;
}

// ---------------------------------------------------------------- extend / prox-ep

struct ExtendArgs {
  std::string mesh, boundary, out, report;
  double p = 16.0;
};

int cmd_extend(const ExtendArgs& a) {
  const auto mesh = load_mesh(a.mesh);
  const auto u = plimit::io::read_boundary_csv(in_path(a.boundary), mesh.boundary_nodes());
  const auto cfg = penergy_config(a.p);
  const auto ext = plimit::p_extension(mesh, u, cfg);
  const fs::path out = out_path(a.out);
  prepare_output(out);
  plimit::io::write_interior_csv(out, ext.field);
  if (!a.report.empty()) {
    write_json(a.report, {{"p", a.p},
                          {"energy", plimit::discrete_energy(mesh, ext.field, cfg)},
                          {"residual", ext.residual},
                          {"iterations", ext.iterations}});
  }
  return kOk;
}

struct ProxArgs {
  std::string mesh, g, out, field, report;
  double p = 16.0, lambda = 0.5;
};

int cmd_prox(const ProxArgs& a) {
  const auto mesh = load_mesh(a.mesh);
  const auto g = plimit::io::read_boundary_csv(in_path(a.g), mesh.boundary_nodes());
  const auto r = plimit::prox_Ep(mesh, g, a.lambda, penergy_config(a.p));
  const fs::path out = out_path(a.out);
  prepare_output(out);
  plimit::io::write_boundary_csv(out, r.trace, mesh.boundary_nodes());
  if (!a.field.empty()) {
    const fs::path f = out_path(a.field);
    prepare_output(f);
    plimit::io::write_interior_csv(f, r.field);
  }
  if (!a.report.empty()) {
    write_json(a.report, {{"p", a.p},
                          {"lambda", a.lambda},
                          {"residual", r.residual},
                          {"iterations", r.iterations}});
  }
  return kOk;
}

// ---------------------------------------------------------------- project

struct ProjectArgs {
  std::string mesh, geo, in, out, report;
};

int cmd_project(const ProjectArgs& a) {
  const auto mesh = load_mesh(a.mesh);
  auto geo = load_geo(a.geo, &mesh);
  if (geo.boundary_nodes != mesh.boundary_nodes()) {
    throw plimit::InvalidArgument("geodesic table and mesh list different boundary nodes");
  }
  const auto g = plimit::io::read_boundary_csv(in_path(a.in), mesh.boundary_nodes());
  plimit::LipschitzProjector proj(plimit::make_constraint_set(std::move(geo)), mesh.sigma());
  const auto r = proj.project(g);
  const fs::path out = out_path(a.out);
  prepare_output(out);
  plimit::io::write_boundary_csv(out, r.point, mesh.boundary_nodes());
  if (!a.report.empty()) {
    write_json(a.report, {{"cycles", r.cycles},
                          {"worst_violation", r.worst_violation},
                          {"complementarity_gap", r.gap}});
  }
  return kOk;
}

// ---------------------------------------------------------------- evolve

struct EvolveArgs {
  std::string functional = "einf";
  std::string mesh, geo, u0, source, out, report;
  double p = 16.0, tau = 1e-3, T = 2.0;
};

int cmd_evolve(const EvolveArgs& a) {
  if (!(a.tau > 0.0) || !(a.T >= a.tau)) throw UsageError("need --tau > 0 and --T >= --tau");
  const auto mesh = load_mesh(a.mesh);
  const auto& bn = mesh.boundary_nodes();
  const auto u0 = plimit::io::read_boundary_csv(in_path(a.u0), bn);
  const auto f = plimit::io::source_from_json(plimit::io::read_json(in_path(a.source)), bn);
  const Eigen::VectorXd sigma = mesh.sigma();

  plimit::Trajectory traj;
  json report;
  if (a.functional == "ep") {
    const auto cfg = penergy_config(a.p);
    traj = plimit::evolve(plimit::ep_resolvent(mesh, cfg), u0, f, a.T, a.tau);
    if (!a.report.empty()) {
      const auto b = plimit::diagnostics(traj, mesh, cfg, f);
      report = {{"functional", "ep"},
                {"p", a.p},
                {"sup_abs_u", b.sup_abs_u},
                {"time_integral_ut_sq", b.time_integral_ut_sq},
                {"grad_p_norm", b.grad_p_norm},
                {"mass_balance_residual", b.mass_balance_residual}};
    }
  } else {
    auto set = plimit::make_constraint_set(load_geo(a.geo, &mesh));
    if (set.geodesic.boundary_nodes != bn) {
      throw plimit::InvalidArgument("geodesic table and mesh list different boundary nodes");
    }
    const plimit::GeodesicTable geo = set.geodesic;
    if (plimit::max_violation(u0.values, geo) > set.tolerance) {
      spdlog::warn("u0 violates the Lipschitz constraints; the first step projects it");
    }
    traj = plimit::evolve(plimit::einf_resolvent(std::move(set), sigma), u0, f, a.T, a.tau);
    double sup = 0.0, worst = 0.0;
    for (const auto& s : traj.states) {
      sup = std::max(sup, s.values.cwiseAbs().maxCoeff());
    }
    for (std::size_t k = 1; k < traj.size(); ++k) {
      worst = std::max(worst, plimit::max_violation(traj.states[k].values, geo));
    }
    report = {{"functional", "einf"},
              {"sup_abs_u", sup},
              {"max_constraint_violation", worst},
              {"mass_balance_residual", plimit::mass_balance_residual(traj, sigma, f)}};
  }
  const fs::path out = out_path(a.out);
  prepare_output(out);
  plimit::io::write_trajectory_csv(out, traj, bn);
  if (!a.report.empty()) {
    report["tau"] = a.tau;
    report["T"] = a.T;
    report["steps"] = traj.size() - 1;
    write_json(a.report, report);
  }
  return kOk;
}

// ---------------------------------------------------------------- sandpile

struct SandpileArgs {
  std::string mesh, gamma, out;
  double t = 1.0;
};

int cmd_sandpile(const SandpileArgs& a) {
  if (!(a.t >= 0.0)) throw UsageError("--t must be nonnegative");
  const auto mesh = load_mesh(a.mesh);
  const json g = plimit::io::read_json(in_path(a.gamma));
  if (!g.is_object() || !g.contains("nodes")) {
    throw plimit::InvalidArgument("gamma JSON needs a \"nodes\" array of mesh node ids");
  }
  const auto pos = plimit::io::boundary_positions(g.at("nodes").get<std::vector<int>>(),
                                                  mesh.boundary_nodes());
  const auto state = plimit::make_sandpile_state(mesh, pos);
  const auto u = plimit::sandpile_exact(state, a.t);
  const fs::path out = out_path(a.out);
  prepare_output(out);
  plimit::io::write_boundary_csv(out, u, mesh.boundary_nodes());
  spdlog::info("level a(t) = {}, support components {}", state.level_at_time(a.t),
               plimit::support_components(mesh, u));
  return kOk;
}

// ---------------------------------------------------------------- example

struct ExampleArgs {
  int id = 1;
  std::optional<double> tau, T, h;
  std::vector<double> u0;
  std::vector<double> p;
  std::string prefix;
};

void write_side_by_side(const fs::path& path, const plimit::ExampleRun& run) {
  prepare_output(path);
  std::ofstream os(path);
  if (!os) throw plimit::InvalidArgument(fmt::format("cannot write {}", path.string()));
  const auto& bn = run.mesh.boundary_nodes();
  os << "t,node_index,exact,flow";
  for (const auto& ep : run.ep) os << ",ep_p" << plimit::io::format_double(ep.p);
  os << '\n';
  for (std::size_t k = 0; k < run.flow.size(); ++k) {
    for (std::size_t b = 0; b < bn.size(); ++b) {
      const auto i = static_cast<Eigen::Index>(b);
      os << plimit::io::format_double(run.flow.times[k]) << ',' << bn[b] << ','
         << plimit::io::format_double(run.exact.states[k][i]) << ','
         << plimit::io::format_double(run.flow.states[k][i]);
      for (const auto& ep : run.ep) os << ',' << plimit::io::format_double(ep.flow.states[k][i]);
      os << '\n';
    }
  }
}

int cmd_example(const ExampleArgs& a) {
  auto opt = plimit::ExampleOptions::preset(a.id);
  if (a.tau) opt.tau = *a.tau;
  if (a.T) opt.T = *a.T;
  if (a.h) opt.h = *a.h;
  if (!a.u0.empty()) {
    if (a.u0.size() != 2) throw UsageError("--u0 takes two values, u0(0),u0(1)");
    opt.u0 = {a.u0[0], a.u0[1]};
  }
  opt.p_values = a.p;
  opt.validate();
  const auto run = plimit::run_example(opt);
  const std::string stem = a.prefix.empty() ? fmt::format("example{}", a.id) : a.prefix;
  write_side_by_side(out_path(stem + "_trajectories.csv"), run);
  write_json(stem + "_summary.json", run.summary);
  std::cout << plimit::io::dump_json(run.summary);
  return kOk;
}

// ---------------------------------------------------------------- transport

struct TransportArgs {
  std::string geo, mu, nu, out, dual, report;
};

int cmd_transport(const TransportArgs& a) {
  const auto geo = load_geo(a.geo, nullptr);
  const auto& bn = geo.boundary_nodes;
  const auto mu = plimit::io::read_boundary_csv(in_path(a.mu), bn);
  const auto nu = plimit::io::read_boundary_csv(in_path(a.nu), bn);
  const auto plan = plimit::solve_primal({mu.values}, {nu.values}, geo);
  const fs::path out = out_path(a.out);
  prepare_output(out);
  {
    std::ofstream os(out);
    if (!os) throw plimit::InvalidArgument(fmt::format("cannot write {}", out.string()));
    os << "from_node,to_node,mass\n";
    for (Eigen::Index i = 0; i < plan.theta.rows(); ++i) {
      for (Eigen::Index j = 0; j < plan.theta.cols(); ++j) {
        if (plan.theta(i, j) != 0.0) {
          os << bn[i] << ',' << bn[j] << ',' << plimit::io::format_double(plan.theta(i, j)) << '\n';
        }
      }
    }
  }
  json rep = {{"cost", plan.cost}};
  if (!a.dual.empty()) {
    const auto d = plimit::solve_dual({mu.values - nu.values}, geo);
    const fs::path dp = out_path(a.dual);
    prepare_output(dp);
    plimit::io::write_boundary_csv(dp, d.potential, bn);
    rep["dual_value"] = d.value;
  }
  if (!a.report.empty()) write_json(a.report, rep);
  std::cout << plimit::io::dump_json(rep);
  return kOk;
}

// ---------------------------------------------------------------- verify-potential

struct VerifyArgs {
  std::string traj, source, geo, mesh, report;
  double t = 1.5;
};

int cmd_verify(const VerifyArgs& a) {
  const auto mesh = load_mesh(a.mesh);
  const auto geo = load_geo(a.geo, &mesh);
  if (geo.boundary_nodes != mesh.boundary_nodes()) {
    throw plimit::InvalidArgument("geodesic table and mesh list different boundary nodes");
  }
  const auto& bn = mesh.boundary_nodes();
  const auto traj = plimit::io::read_trajectory_csv(in_path(a.traj), bn);
  const auto f = plimit::io::source_from_json(plimit::io::read_json(in_path(a.source)), bn);
  if (traj.size() < 3) throw plimit::InvalidArgument("trajectory needs at least three times");
  std::size_t k = 1;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    if (std::abs(traj.times[i] - a.t) < std::abs(traj.times[k] - a.t)) k = i;
  }
  const auto r = plimit::verify_potential(traj, f, geo, mesh.sigma(), k);
  auto num = [](double x) { return std::isnan(x) ? json(nullptr) : json(x); };
  json rep = {{"time", r.time},
              {"balanced", r.balanced},
              {"imbalance", r.imbalance},
              {"value_at_u", r.value_at_u},
              {"value_opt", num(r.value_opt)},
              {"relative_gap", num(r.relative_gap)},
              {"opposite_value_at_u", r.opposite_value_at_u},
              {"opposite_value_opt", num(r.opposite_value_opt)},
              {"opposite_relative_gap", num(r.opposite_relative_gap)},
              {"feasibility_violation", r.feasibility_violation}};
  if (!a.report.empty()) write_json(a.report, rep);
  std::cout << plimit::io::dump_json(rep);
  return kOk;
}

// ---------------------------------------------------------------- mosco

struct MoscoArgs {
  std::string mesh, geo, g, report;
  std::vector<double> lambdas{0.1, 1.0, 10.0};
  std::vector<double> ladder{4, 8, 16, 32, 64};
};

int cmd_mosco(const MoscoArgs& a) {
  const auto mesh = load_mesh(a.mesh);
  const auto geo = load_geo(a.geo, &mesh);
  const auto g = plimit::io::read_boundary_csv(in_path(a.g), mesh.boundary_nodes());
  const auto r = plimit::resolvent_convergence_test(g, a.lambdas, a.ladder, mesh, geo,
                                                    plimit::PEnergyConfig{});
  auto matrix = [](const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        row.push_back(std::isnan(m(i, j)) ? json(nullptr) : json(m(i, j)));
      }
      rows.push_back(row);
    }
    return rows;
  };
  json failures = json::array();
  for (const auto& f : r.failures) {
    failures.push_back({{"lambda_index", f.lambda_index}, {"p_index", f.p_index}, {"message", f.message}});
  }
  json proj = json::array();
  for (Eigen::Index i = 0; i < r.projection.size(); ++i) proj.push_back(r.projection[i]);
  const json rep = {{"lambdas", r.lambdas},
                    {"p_ladder", r.p_ladder},
                    {"resolvent_errors", matrix(r.resolvent_errors)},
                    {"constraint_violations", matrix(r.constraint_violations)},
                    {"projection", proj},
                    {"projection_violation", r.projection_violation},
                    {"last_column_minimal", r.last_column_minimal()},
                    {"failures", failures}};
  write_json(a.report, rep);
  return kOk;
}

// ---------------------------------------------------------------- suite

struct SuiteArgs {
  std::string config, report;
  std::vector<int> criteria;
  bool no_timing = false;
};

int cmd_suite(const SuiteArgs& a) {
  std::ifstream is(in_path(a.config));
  const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw UsageError("config file is empty");
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw plimit::InvalidArgument(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (j.is_object() && j.empty()) throw UsageError("config is empty; see docs/suite.default.json");
  auto cfg = plimit::SuiteConfig::from_json(j);
  if (globals.seed) cfg.seed = *globals.seed;
  cfg.validate();

  std::vector<int> ids = a.criteria;
  if (ids.empty()) ids = {1, 2, 3, 4, 5, 6, 7, 8};
  plimit::SuiteReport rep;
  for (int id : ids) {
    rep.records.push_back(plimit::run_criterion(id, cfg));
    std::cout << rep.records.back().line() << '\n' << std::flush;
  }
  json out = rep.to_json();
  out["config"] = cfg.to_json();
  if (a.no_timing) {
    for (auto& c : out["criteria"]) {
      c.erase("runtime_s");
      auto& parts = c["parts"];
      json kept = json::array();
      for (auto& p : parts) {
        if (!p["id"].get<std::string>().ends_with("-runtime")) kept.push_back(p);
      }
      parts = kept;
    }
  }
  if (!a.report.empty()) write_json(a.report, out);
  return rep.all_pass() ? kOk : kCriteriaFailed;
}

int fail(const std::string& type, const std::string& message, const std::string& command,
         int code) {
  json rec = {{"error", {{"type", type}, {"message", message}, {"command", command}, {"exit_code", code}}}};
  std::cerr << rec.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-Laplacian dynamical boundary flows and their p -> infinity limit"};
  app.require_subcommand(1);
  // --h is the mesh size, so help stays long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.add_option("--seed", globals.seed, "Seed for randomized property suites");
  app.add_option("--out-dir", globals.out_dir, "Directory for relative output paths");
  app.add_option("--log-level", globals.log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  MeshArgs mesh_a;
  auto* mesh = app.add_subcommand("mesh", "Build a mesh (and optionally its geodesic table)");
  mesh->add_option("--shape", mesh_a.shape)->required()->check(CLI::IsMember({"interval", "square", "polygon"}));
  mesh->add_option("--n", mesh_a.n, "Interval elements or polygon sides");
  mesh->add_option("--h", mesh_a.h, "Target edge length");
  mesh->add_option("--rx", mesh_a.rx, "Polygon semi-axis in x");
  mesh->add_option("--ry", mesh_a.ry, "Polygon semi-axis in y");
  mesh->add_option("--out", mesh_a.out)->required();
  mesh->add_option("--geo", mesh_a.geo, "Also write the boundary geodesic table");

  ExtendArgs ext_a;
  auto* extend = app.add_subcommand("extend", "Minimal p-energy extension of boundary data");
  extend->add_option("--mesh", ext_a.mesh)->required();
  extend->add_option("--boundary", ext_a.boundary)->required();
  extend->add_option("--p", ext_a.p);
  extend->add_option("--out", ext_a.out)->required();
  extend->add_option("--report", ext_a.report);

  ProxArgs prox_a;
  auto* prox = app.add_subcommand("prox-ep", "Resolvent of the boundary p-energy");
  prox->add_option("--mesh", prox_a.mesh)->required();
  prox->add_option("--g", prox_a.g)->required();
  prox->add_option("--lambda", prox_a.lambda);
  prox->add_option("--p", prox_a.p);
  prox->add_option("--out", prox_a.out)->required();
  prox->add_option("--field", prox_a.field, "Also write the interior minimizer");
  prox->add_option("--report", prox_a.report);

  ProjectArgs proj_a;
  auto* project = app.add_subcommand("project", "Project boundary data onto the Lipschitz set");
  project->add_option("--mesh", proj_a.mesh)->required();
  project->add_option("--geo", proj_a.geo, "Geodesic table (computed from the mesh if absent)");
  project->add_option("--in", proj_a.in)->required();
  project->add_option("--out", proj_a.out)->required();
  project->add_option("--report", proj_a.report);

  EvolveArgs ev_a;
  auto* evolve = app.add_subcommand("evolve", "Implicit Euler flow");
  evolve->add_option("--functional", ev_a.functional)->check(CLI::IsMember({"ep", "einf"}));
  evolve->add_option("--mesh", ev_a.mesh)->required();
  evolve->add_option("--geo", ev_a.geo);
  evolve->add_option("--p", ev_a.p);
  evolve->add_option("--tau", ev_a.tau);
  evolve->add_option("--T", ev_a.T);
  evolve->add_option("--u0", ev_a.u0)->required();
  evolve->add_option("--source", ev_a.source)->required();
  evolve->add_option("--out", ev_a.out)->required();
  evolve->add_option("--report", ev_a.report);

  SandpileArgs sand_a;
  auto* sand = app.add_subcommand("sandpile", "Closed-form sandpile state");
  sand->add_option("--mesh", sand_a.mesh)->required();
  sand->add_option("--gamma", sand_a.gamma, "JSON {\"nodes\": [mesh node ids]}")->required();
  sand->add_option("--t", sand_a.t);
  sand->add_option("--out", sand_a.out)->required();

  ExampleArgs ex_a;
  auto* example = app.add_subcommand("example", "Run a worked example against its closed form");
  example->add_option("--id", ex_a.id)->required()->check(CLI::Range(1, 3));
  example->add_option("--tau", ex_a.tau);
  example->add_option("--T", ex_a.T);
  example->add_option("--h", ex_a.h);
  example->add_option("--u0", ex_a.u0)->delimiter(',');
  example->add_option("--p", ex_a.p, "E_p flows to run alongside")->delimiter(',');
  example->add_option("--prefix", ex_a.prefix, "Output file stem");

  TransportArgs tr_a;
  auto* transport = app.add_subcommand("transport", "Optimal transport for the geodesic cost");
  transport->add_option("--geo", tr_a.geo)->required();
  transport->add_option("--mu", tr_a.mu)->required();
  transport->add_option("--nu", tr_a.nu)->required();
  transport->add_option("--out", tr_a.out)->required();
  transport->add_option("--dual", tr_a.dual);
  transport->add_option("--report", tr_a.report);

  VerifyArgs ver_a;
  auto* verify = app.add_subcommand("verify-potential", "Duality gap of a flow state");
  verify->add_option("--traj", ver_a.traj)->required();
  verify->add_option("--source", ver_a.source)->required();
  verify->add_option("--mesh", ver_a.mesh)->required();
  verify->add_option("--geo", ver_a.geo);
  verify->add_option("--t", ver_a.t);
  verify->add_option("--report", ver_a.report);

  MoscoArgs mo_a;
  auto* mosco = app.add_subcommand("mosco", "Resolvent convergence table");
  mosco->add_option("--mesh", mo_a.mesh)->required();
  mosco->add_option("--geo", mo_a.geo);
  mosco->add_option("--g", mo_a.g)->required();
  mosco->add_option("--lambdas", mo_a.lambdas)->delimiter(',');
  mosco->add_option("--pladder", mo_a.ladder)->delimiter(',');
  mosco->add_option("--report", mo_a.report)->required();

  SuiteArgs su_a;
  auto* suite = app.add_subcommand("suite", "Acceptance suite");
  suite->add_option("--config", su_a.config)->required();
  suite->add_option("--report", su_a.report);
  suite->add_option("--criteria", su_a.criteria)->delimiter(',')->check(CLI::Range(1, 8));
  suite->add_flag("--no-timing", su_a.no_timing, "Omit wall-clock fields from the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), "", kUsage);
  }

  auto logger = spdlog::stderr_color_mt("plimit");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(globals.log_level));

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "mesh") return cmd_mesh(mesh_a);
    if (name == "extend") return cmd_extend(ext_a);
    if (name == "prox-ep") return cmd_prox(prox_a);
    if (name == "project") return cmd_project(proj_a);
    if (name == "evolve") return cmd_evolve(ev_a);
    if (name == "sandpile") return cmd_sandpile(sand_a);
    if (name == "example") return cmd_example(ex_a);
    if (name == "transport") return cmd_transport(tr_a);
    if (name == "verify-potential") return cmd_verify(ver_a);
    if (name == "mosco") return cmd_mosco(mo_a);
    return cmd_suite(su_a);
  } catch (const UsageError& e) {
    return fail("usage", e.what(), name, kUsage);
  } catch (const plimit::NonConvergence& e) {
    return fail("non_convergence", e.what(), name, kNumerical);
  } catch (const plimit::MaxIterations& e) {
    return fail("max_iterations", e.what(), name, kNumerical);
  } catch (const plimit::InfeasibleTolerance& e) {
    return fail("infeasible_tolerance", e.what(), name, kNumerical);
  } catch (const plimit::UnbalancedMasses& e) {
    return fail("unbalanced_masses", e.what(), name, kInput);
  } catch (const plimit::Error& e) {
    return fail("invalid_input", e.what(), name, kInput);
  } catch (const json::exception& e) {
    return fail("invalid_input", e.what(), name, kInput);
  } catch (const std::exception& e) {
    return fail("io", e.what(), name, kInput);
  }
}
