#include "plimit/suite.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <fmt/format.h>

#include "plimit/error.hpp"
#include "plimit/experiments.hpp"
#include "plimit/limitdyn.hpp"
#include "plimit/mesh.hpp"
#include "plimit/mosco.hpp"
#include "plimit/oracles.hpp"
#include "plimit/proxflow.hpp"
#include "plimit/transport.hpp"

namespace plimit {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// --- configuration -------------------------------------------------------

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(fmt::format("config: {} must be an object", where));
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw InvalidArgument(fmt::format("config: unknown key '{}' in {}", item.key(), where));
    }
  }
}

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

// --- helpers -------------------------------------------------------------

CriterionPart part(std::string id, std::string description, double measured, double threshold,
                   bool pass) {
  return {std::move(id), std::move(description), measured, threshold, pass};
}

// Passes when measured <= threshold; NaN never passes.
CriterionPart at_most(std::string id, std::string description, double measured,
                      double threshold) {
  return part(std::move(id), std::move(description), measured, threshold, measured <= threshold);
}

CriterionPart below(std::string id, std::string description, double measured, double threshold) {
  return part(std::move(id), std::move(description), measured, threshold, measured < threshold);
}

// Largest ratio of consecutive entries; < 1 means strictly decreasing.
double max_consecutive_ratio(const std::vector<double>& v) {
  double worst = 0.0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    worst = std::max(worst, v[k - 1] > 0.0 ? v[k] / v[k - 1] : (v[k] > 0.0 ? kNaN : 1.0));
    if (std::isnan(worst)) return worst;
  }
  return worst;
}

ExampleOptions sweep_options(const SuiteConfig& cfg) {
  ExampleOptions o = ExampleOptions::preset(1);
  o.tau = cfg.sweep_tau;
  o.T = cfg.sweep_T;
  o.interval_n = cfg.interval_n;
  o.p_values = cfg.sweep_p;
  o.penergy = cfg.penergy;
  return o;
}

// Index of the grid time closest to t.
std::size_t time_index(const Trajectory& traj, double t) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    if (std::abs(traj.times[k] - t) < std::abs(traj.times[best] - t)) best = k;
  }
  return best;
}

// Metric on n points: Euclidean on random points, or shortest paths over
// random edge weights.
Eigen::MatrixXd random_metric(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd d(n, n);
  if (unit(rng) < 0.5) {
    Eigen::MatrixXd pts(n, 2);
    for (int i = 0; i < n; ++i) pts.row(i) << unit(rng), unit(rng);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d(i, j) = (pts.row(i) - pts.row(j)).norm();
    }
    return d;
  }
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = 0.1 + 0.9 * unit(rng);
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    }
  }
  return d;
}

GeodesicTable table_from(const Eigen::MatrixXd& d) {
  GeodesicTable geo;
  geo.dist = d;
  for (Eigen::Index i = 0; i < d.rows(); ++i) geo.boundary_nodes.push_back(static_cast<int>(i));
  return geo;
}

Eigen::VectorXd uniform_vector(Eigen::Index n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

// --- criteria ------------------------------------------------------------

void criterion1(const SuiteConfig& cfg, CriterionRecord& r) {
  ExampleOptions o = ExampleOptions::preset(1);
  o.tau = cfg.ex1_tau;
  o.T = cfg.ex1_T;
  o.interval_n = cfg.interval_n;
  const ExampleRun run = run_example(o);
  const double err = run.summary.at("sup_error").get<double>();
  const double slope = run.summary.at("late_slope").get<double>();
  r.parts.push_back(at_most("1", "sup error of the limit flow vs closed form", err, 5.0 * o.tau));
  r.parts.push_back(at_most("1-slope", "|late-time slope - 1/2|", std::abs(slope - 0.5), 5.0 * o.tau));
  const std::size_t k1 = time_index(run.flow, 1.0);
  r.parts.push_back(at_most("1-switch", "error at the branch switch t = 1",
                            (run.flow.states[k1].values - example1_exact(run.flow.times[k1]).values)
                                .cwiseAbs()
                                .maxCoeff(),
                            5.0 * o.tau));
  r.details = run.summary;
}

void criterion2(const SuiteConfig& cfg, CriterionRecord& r) {
  ExampleOptions o = ExampleOptions::preset(2);
  o.tau = cfg.ex2_tau;
  o.T = cfg.ex2_T;
  o.u0 = {cfg.ex2_u0_0, cfg.ex2_u0_1};
  o.interval_n = cfg.interval_n;
  const ExampleRun run = run_example(o);
  r.parts.push_back(at_most("2", "|detected slope change - t0|",
                            run.summary.at("switch_time_error").get<double>(), o.tau * (1.0 + 1e-9)));
  r.details = run.summary;
}

void criterion3(const SuiteConfig& cfg, CriterionRecord& r) {
  ExampleOptions o = ExampleOptions::preset(3);
  o.tau = cfg.ex3_tau;
  o.T = cfg.ex3_T;
  o.h = cfg.ex3_h;
  o.uniform_tol = cfg.ex3_uniform_tol;
  const ExampleRun run = run_example(o);
  const auto& s = run.summary;
  r.parts.push_back(at_most("3a", "L-infinity error of the limit flow vs (a(t) - d)+",
                            s.at("sup_error").get<double>(), 0.05));
  r.parts.push_back(at_most("3b", "relative error of the mass identity",
                            s.at("mass_identity_relative_error").get<double>(), 0.01));
  const json& se = s.at("uniform_speed_relative_error");
  r.parts.push_back(at_most("3c", "relative error of the uniform growth speed",
                            se.is_number() ? se.get<double>() : kNaN, 0.02));
  r.details = s;
}

void criterion4(const SuiteConfig& cfg, CriterionRecord& r) {
  const ExampleRun run = run_example(sweep_options(cfg));
  std::vector<double> d;
  for (const auto& ep : run.ep) d.push_back(ep.distance_to_limit);
  r.parts.push_back(below("4a", "largest ratio of consecutive distances (strict decrease)",
                          max_consecutive_ratio(d), 1.0));
  r.parts.push_back(at_most("4b", fmt::format("distance to the limit flow at p = {}", run.ep.back().p),
                            d.back(), 0.05));
  r.details = run.summary;
}

void criterion5(const SuiteConfig& cfg, CriterionRecord& r) {
  const DomainMesh mesh = build_interval_mesh(cfg.interval_n);
  const GeodesicTable geo = boundary_pairwise_distances(mesh);
  BoundaryField g{Eigen::Vector2d(0.0, 3.0)};
  const MoscoReport rep = resolvent_convergence_test(g, {1.0}, cfg.resolvent_p, mesh, geo, cfg.penergy);
  std::vector<double> errs;
  for (Eigen::Index c = 0; c < rep.resolvent_errors.cols(); ++c) errs.push_back(rep.resolvent_errors(0, c));
  const double slab = (rep.projection.values - Eigen::Vector2d(1.0, 2.0)).cwiseAbs().maxCoeff();
  r.parts.push_back(at_most("5-proj", "projection of (0,3) vs (1,2)", slab, 1e-8));
  r.parts.push_back(below("5a", "largest ratio of consecutive resolvent errors (strict decrease)",
                          max_consecutive_ratio(errs), 1.0));
  r.parts.push_back(at_most("5b", fmt::format("resolvent error at p = {}", cfg.resolvent_p.back()),
                            errs.back(), 0.05));
  const ProxResult cell = prox_Ep(mesh, BoundaryField{Eigen::Vector2d(0.0, 2.0)}, 1.0,
                                  with_exponent(cfg.penergy, 4.0));
  r.parts.push_back(at_most("5c", "prox at p = 4, g = (0,2) vs (0.5,1.5)",
                            (cell.trace.values - Eigen::Vector2d(0.5, 1.5)).cwiseAbs().maxCoeff(), 1e-6));
  r.details["resolvent_errors"] = errs;
  r.details["p"] = cfg.resolvent_p;
  r.details["failures"] = rep.failures.size();
}

void criterion6(const SuiteConfig& cfg, CriterionRecord& r) {
  {
    const DomainMesh mesh = build_interval_mesh(cfg.interval_n);
    const GeodesicTable geo = boundary_pairwise_distances(mesh);
    const SourceTerm f = constant_source(BoundaryField{Eigen::Vector2d(0.0, 1.0)});
    const double tau = cfg.dual_ex1_tau;
    const Trajectory traj = evolve(einf_resolvent(make_constraint_set(geo), mesh.sigma()),
                                   BoundaryField{Eigen::Vector2d::Zero()}, f,
                                   cfg.dual_ex1_t + 2.0 * tau, tau);
    const DualityReport rep = verify_potential(traj, f, geo, mesh.sigma(), time_index(traj, cfg.dual_ex1_t));
    r.parts.push_back(at_most("6a", "Example 1 relative duality gap",
                              rep.balanced ? std::abs(rep.relative_gap) : kNaN, 1e-6 + 10.0 * tau));
    r.details["example1"] = {{"time", rep.time},
                             {"value_at_u", rep.value_at_u},
                             {"value_opt", rep.value_opt},
                             {"relative_gap", rep.relative_gap},
                             {"opposite_value_at_u", rep.opposite_value_at_u},
                             {"opposite_value_opt", rep.opposite_value_opt},
                             {"opposite_relative_gap", rep.opposite_relative_gap}};
  }
  {
    const auto square = unit_square();
    const DomainMesh mesh = build_polygon_mesh(square, cfg.dual_ex3_h);
    const GeodesicTable geo = boundary_pairwise_distances(mesh);
    const auto gamma = bottom_edge_gamma(mesh);
    Eigen::VectorXd fv = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.boundary_count()));
    for (int g : gamma) fv[g] = 1.0;
    const SourceTerm f = constant_source(BoundaryField{fv});
    const double tau = cfg.dual_ex3_tau;
    const Trajectory traj =
        evolve(einf_resolvent(make_constraint_set(geo), mesh.sigma()),
               BoundaryField{Eigen::VectorXd::Zero(fv.size())}, f, cfg.dual_ex3_t + 2.0 * tau, tau);
    const DualityReport rep = verify_potential(traj, f, geo, mesh.sigma(), time_index(traj, cfg.dual_ex3_t));
    const double gap = rep.balanced ? (rep.value_opt - rep.value_at_u) / (1.0 + std::abs(rep.value_opt)) : kNaN;
    r.parts.push_back(at_most("6b", "Example 3 duality gap / (1 + value)", gap, 1e-3));
    r.parts.push_back(at_most("6c", "Example 3 Lipschitz violation of u(t) / max distance",
                              rep.feasibility_violation / geo.dist.maxCoeff(), 1e-8));
    r.details["example3"] = {{"time", rep.time},
                             {"imbalance", rep.imbalance},
                             {"value_at_u", rep.value_at_u},
                             {"value_opt", rep.value_opt},
                             {"opposite_value_at_u", rep.opposite_value_at_u},
                             {"opposite_value_opt", rep.opposite_value_opt}};
  }
}

void criterion7(const SuiteConfig& cfg, CriterionRecord& r) {
  const ExampleRun run = run_example(sweep_options(cfg));
  std::vector<double> sup_u, grad;
  for (const auto& ep : run.ep) {
    const BoundsReport b = diagnostics(ep.flow, run.mesh, with_exponent(cfg.penergy, ep.p), run.source);
    sup_u.push_back(b.sup_abs_u);
    grad.push_back(b.grad_p_norm);
  }
  double ru = 0.0, rg = 0.0;
  for (std::size_t k = 0; k < sup_u.size(); ++k) {
    ru = std::max(ru, sup_u[k] / sup_u.front());
    rg = std::max(rg, grad[k] / grad.front());
  }
  r.parts.push_back(at_most("7a", fmt::format("max sup|u_p| / its value at p = {}", run.ep.front().p), ru, 2.0));
  r.parts.push_back(at_most("7b", fmt::format("max gradient p-norm / its value at p = {}", run.ep.front().p),
                            rg, 2.0));
  r.details["p"] = cfg.sweep_p;
  r.details["sup_abs_u"] = sup_u;
  r.details["grad_p_norm"] = grad;
}

void criterion8(const SuiteConfig& cfg, CriterionRecord& r) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = cfg.property_cases;
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  const DomainMesh interval = build_interval_mesh(4);
  const auto square_pts = unit_square();
  const DomainMesh square = build_polygon_mesh(square_pts, 0.25);
  const double ps[] = {2.0, 3.0, 4.0, 8.0, 16.0};

  // Prox: nonexpansiveness and mean preservation.
  double prox_ratio = 0.0, prox_mean = 0.0;
  for (int c = 0; c < n; ++c) {
    const DomainMesh& mesh = c % 2 ? square : interval;
    const Eigen::VectorXd sigma = mesh.sigma();
    const PEnergyConfig pc = with_exponent(cfg.penergy, ps[pick(0, 4)]);
    const double lambda = 0.05 + 2.0 * unit(rng);
    const auto B = static_cast<Eigen::Index>(mesh.boundary_count());
    const BoundaryField g1{uniform_vector(B, -1.0, 1.0, rng)}, g2{uniform_vector(B, -1.0, 1.0, rng)};
    const BoundaryField a = prox_Ep(mesh, g1, lambda, pc).trace;
    const BoundaryField b = prox_Ep(mesh, g2, lambda, pc).trace;
    prox_ratio = std::max(prox_ratio, weighted_l2(a.values - b.values, sigma) /
                                          weighted_l2(g1.values - g2.values, sigma));
    prox_mean = std::max(prox_mean, std::abs(sigma.dot(a.values - g1.values)) / weighted_l2(g1.values, sigma));
    prox_mean = std::max(prox_mean, std::abs(sigma.dot(b.values - g2.values)) / weighted_l2(g2.values, sigma));
  }
  r.parts.push_back(at_most("8-prox-nonexp", "max ||prox g1 - prox g2|| / ||g1 - g2||", prox_ratio, 1.0 + 1e-8));
  r.parts.push_back(at_most("8-prox-mean", "max |sum sigma (prox g - g)| / ||g||", prox_mean, 1e-8));

  // Projection: nonexpansiveness, mean, idempotence, feasibility.
  double proj_ratio = 0.0, proj_mean = 0.0, idem = 0.0, feas = 0.0;
  for (int c = 0; c < n; ++c) {
    const int B = pick(2, 12);
    const GeodesicTable geo = table_from(random_metric(B, rng));
    const Eigen::VectorXd sigma = uniform_vector(B, 0.2, 2.0, rng);
    const LipschitzConstraintSet set = make_constraint_set(geo);
    const BoundaryField g1{uniform_vector(B, -2.0, 2.0, rng)}, g2{uniform_vector(B, -2.0, 2.0, rng)};
    const BoundaryField a = project_Ainf(g1, set, sigma);
    const BoundaryField b = project_Ainf(g2, set, sigma);
    const BoundaryField aa = project_Ainf(a, set, sigma);
    proj_ratio = std::max(proj_ratio, weighted_l2(a.values - b.values, sigma) /
                                          weighted_l2(g1.values - g2.values, sigma));
    proj_mean = std::max(proj_mean, std::abs(sigma.dot(a.values - g1.values)) / weighted_l2(g1.values, sigma));
    proj_mean = std::max(proj_mean, std::abs(sigma.dot(b.values - g2.values)) / weighted_l2(g2.values, sigma));
    idem = std::max(idem, weighted_l2(aa.values - a.values, sigma));
    const double md = geo.dist.maxCoeff();
    feas = std::max({feas, max_violation(a.values, geo) / md, max_violation(b.values, geo) / md});
  }
  r.parts.push_back(at_most("8-proj-nonexp", "max ||P g1 - P g2|| / ||g1 - g2||", proj_ratio, 1.0 + 1e-8));
  r.parts.push_back(at_most("8-proj-mean", "max |sum sigma (P g - g)| / ||g||", proj_mean, 1e-8));
  r.parts.push_back(at_most("8-proj-idem", "max ||P P g - P g||", idem, 1e-8));
  r.parts.push_back(at_most("8-proj-feas", "max Lipschitz violation / max distance", feas, 1e-8));

  // Unforced E_p flows do not increase the energy.
  double growth = 0.0;
  for (int c = 0; c < n; ++c) {
    const DomainMesh& mesh = c % 2 ? square : interval;
    const PEnergyConfig pc = with_exponent(cfg.penergy, ps[pick(0, 3)]);
    const double tau = 0.01 + 0.5 * unit(rng);
    const auto B = static_cast<Eigen::Index>(mesh.boundary_count());
    const SourceTerm zero = constant_source(BoundaryField{Eigen::VectorXd::Zero(B)});
    const Trajectory traj = evolve(ep_resolvent(mesh, pc), BoundaryField{uniform_vector(B, -1.0, 1.0, rng)},
                                   zero, 4.0 * tau, tau);
    double prev = energy_Ep(mesh, traj.states[0], pc);
    for (std::size_t k = 1; k < traj.size(); ++k) {
      const double e = energy_Ep(mesh, traj.states[k], pc);
      growth = std::max(growth, (e - prev) / (1.0 + prev));
      prev = e;
    }
  }
  r.parts.push_back(at_most("8-energy-decay", "max relative energy increase along unforced flows", growth, 1e-9));

  // Gradient check.
  double grad_err = 0.0;
  const DomainMesh fine_interval = build_interval_mesh(8);
  for (int c = 0; c < n; ++c) {
    const DomainMesh& mesh = c % 2 ? square : fine_interval;
    PEnergyConfig pc = with_exponent(cfg.penergy, 2.0 + 14.0 * unit(rng));
    if (!(pc.eps_reg > 0.0)) pc.eps_reg = 1e-8;
    const InteriorField v{uniform_vector(static_cast<Eigen::Index>(mesh.node_count()), -1.0, 1.0, rng)};
    grad_err = std::max(grad_err, gradient_check(mesh, v, pc, rng()));
  }
  r.parts.push_back(at_most("8-gradient", "max relative gradient discrepancy", grad_err, 1e-4));

  // Geodesic tables on random convex polygons.
  double tri = 0.0, chord = 0.0;
  for (int c = 0; c < n; ++c) {
    const double rx = 0.5 + unit(rng), ry = 0.5 + unit(rng);
    const auto poly = inscribed_polygon(pick(3, 12), rx, ry);
    const DomainMesh mesh = build_polygon_mesh(poly, (0.1 + 0.2 * unit(rng)) * std::min(rx, ry));
    const GeodesicTable geo = boundary_pairwise_distances(mesh);
    const auto B = static_cast<Eigen::Index>(geo.size());
    auto triple = [&](Eigen::Index i, Eigen::Index j, Eigen::Index k) {
      tri = std::max(tri, geo.dist(i, k) - geo.dist(i, j) - geo.dist(j, k));
    };
    if (B <= 64) {
      for (Eigen::Index i = 0; i < B; ++i) {
        for (Eigen::Index j = 0; j < B; ++j) {
          for (Eigen::Index k = 0; k < B; ++k) triple(i, j, k);
        }
      }
    } else {
      std::uniform_int_distribution<Eigen::Index> idx(0, B - 1);
      for (int s = 0; s < 20000; ++s) triple(idx(rng), idx(rng), idx(rng));
    }
    for (Eigen::Index i = 0; i < B; ++i) {
      for (Eigen::Index j = 0; j < B; ++j) {
        const double e = (mesh.nodes()[geo.boundary_nodes[i]] - mesh.nodes()[geo.boundary_nodes[j]]).norm();
        chord = std::max(chord, e - geo.dist(i, j));
      }
    }
  }
  const DomainMesh fine = build_polygon_mesh(square_pts, cfg.ex3_h);
  const double ratio = max_chord_ratio(fine, boundary_pairwise_distances(fine));
  r.parts.push_back(at_most("8-geo-triangle", "max triangle inequality violation", tri, 1e-12));
  r.parts.push_back(at_most("8-geo-chord", "max (chord - table distance)", chord, 1e-10));
  r.parts.push_back(at_most("8-geo-ratio", fmt::format("chord ratio on the unit square, h = {}", cfg.ex3_h),
                            ratio, 1.09));

  // Transport duality.
  double weak = -std::numeric_limits<double>::infinity(), strong = 0.0;
  for (int c = 0; c < n; ++c) {
    const int B = pick(2, 8);
    const GeodesicTable geo = table_from(random_metric(B, rng));
    // Dense instance: primal against dual, plus random feasible potentials.
    Eigen::VectorXd mu = uniform_vector(B, 0.0, 1.0, rng), nu = uniform_vector(B, 0.0, 1.0, rng);
    nu *= mu.sum() / nu.sum();
    const TransportPlan plan = solve_primal({mu}, {nu}, geo);
    const DualSolution dual = solve_dual({mu - nu}, geo);
    weak = std::max(weak, dual.value - plan.cost);
    for (int s = 0; s < 5; ++s) {
      const Eigen::VectorXd anchor = uniform_vector(B, -1.0, 1.0, rng);
      Eigen::VectorXd v(B);
      for (int i = 0; i < B; ++i) v[i] = (anchor.transpose().array() + geo.dist.row(i).array()).minCoeff();
      weak = std::max(weak, v.dot(mu - nu) - plan.cost);
    }
    // Sparse instance with at most four source and four target points.
    Eigen::VectorXd ms = Eigen::VectorXd::Zero(B), ns = Eigen::VectorXd::Zero(B);
    for (int s = 0; s < std::min(B, 4); ++s) ms[pick(0, B - 1)] += unit(rng) + 0.05;
    for (int s = 0; s < std::min(B, 4); ++s) ns[pick(0, B - 1)] += unit(rng) + 0.05;
    ns *= ms.sum() / ns.sum();
    const double brute = oracles::brute_force_transport(ms, ns, geo.dist);
    const DualSolution sd = solve_dual({ms - ns}, geo);
    weak = std::max(weak, sd.value - brute);
    strong = std::max(strong, std::abs(sd.value - brute));
    strong = std::max(strong, std::abs(solve_primal({ms}, {ns}, geo).cost - brute));
  }
  r.parts.push_back(at_most("8-weak-duality", "max (dual value - primal cost)", weak, 1e-9));
  r.parts.push_back(at_most("8-strong-duality", "max |LP value - brute-force optimum|", strong, 1e-6));

  // Projection against the exhaustive QP.
  double qp = 0.0;
  for (int c = 0; c < n; ++c) {
    const int B = pick(2, 6);
    const GeodesicTable geo = table_from(random_metric(B, rng));
    const Eigen::VectorXd sigma = uniform_vector(B, 0.2, 2.0, rng);
    const BoundaryField g{uniform_vector(B, -2.0, 2.0, rng)};
    const BoundaryField p = project_Ainf(g, make_constraint_set(geo), sigma);
    const Eigen::VectorXd q = oracles::brute_force_projection(g.values, sigma, geo.dist);
    qp = std::max(qp, weighted_l2(p.values - q, sigma));
  }
  r.parts.push_back(at_most("8-qp", "max ||project - brute-force QP||", qp, 1e-6));
  r.details["cases_per_property"] = n;
  r.details["seed"] = cfg.seed;
}

struct CriterionSpec {
  const char* name;
  double runtime_limit;  // seconds, <= 0 when none is set
  void (*run)(const SuiteConfig&, CriterionRecord&);
};

const CriterionSpec kCriteria[] = {
    {"Example 1 reproduction", 5.0, criterion1},
    {"Example 2 slope-change time", 5.0, criterion2},
    {"Example 3 sandpile", 180.0, criterion3},
    {"E_p flows approach the limit flow", 120.0, criterion4},
    {"resolvent convergence", 0.0, criterion5},
    {"Kantorovich potential duality", 60.0, criterion6},
    {"p-uniform bounds", 0.0, criterion7},
    {"property suites", 180.0, criterion8},
};

}  // namespace

SuiteConfig SuiteConfig::from_json(const json& j) {
  if (!j.is_object() || j.empty()) throw InvalidArgument("config must be a non-empty JSON object");
  reject_unknown(j, {"seed", "property_cases", "example1", "example2", "example3", "sweep", "resolvent",
                     "duality", "penergy"},
                 "config");
  SuiteConfig c;
  try {
    take(j, "seed", c.seed);
    take(j, "property_cases", c.property_cases);
    if (j.contains("example1")) {
      const json& e = j.at("example1");
      reject_unknown(e, {"tau", "T"}, "example1");
      take(e, "tau", c.ex1_tau);
      take(e, "T", c.ex1_T);
    }
    if (j.contains("example2")) {
      const json& e = j.at("example2");
      reject_unknown(e, {"u0", "tau", "T"}, "example2");
      if (e.contains("u0")) {
        const auto u0 = e.at("u0").get<std::vector<double>>();
        if (u0.size() != 2) throw InvalidArgument("config: example2.u0 needs two values");
        c.ex2_u0_0 = u0[0];
        c.ex2_u0_1 = u0[1];
      }
      take(e, "tau", c.ex2_tau);
      take(e, "T", c.ex2_T);
    }
    if (j.contains("example3")) {
      const json& e = j.at("example3");
      reject_unknown(e, {"h", "tau", "T", "uniform_tol"}, "example3");
      take(e, "h", c.ex3_h);
      take(e, "tau", c.ex3_tau);
      take(e, "T", c.ex3_T);
      take(e, "uniform_tol", c.ex3_uniform_tol);
    }
    if (j.contains("sweep")) {
      const json& e = j.at("sweep");
      reject_unknown(e, {"p", "tau", "T", "interval_n"}, "sweep");
      take(e, "p", c.sweep_p);
      take(e, "tau", c.sweep_tau);
      take(e, "T", c.sweep_T);
      take(e, "interval_n", c.interval_n);
    }
    if (j.contains("resolvent")) {
      const json& e = j.at("resolvent");
      reject_unknown(e, {"p"}, "resolvent");
      take(e, "p", c.resolvent_p);
    }
    if (j.contains("duality")) {
      const json& e = j.at("duality");
      reject_unknown(e, {"example1_t", "example1_tau", "example3_t", "example3_tau", "example3_h"},
                     "duality");
      take(e, "example1_t", c.dual_ex1_t);
      take(e, "example1_tau", c.dual_ex1_tau);
      take(e, "example3_t", c.dual_ex3_t);
      take(e, "example3_tau", c.dual_ex3_tau);
      take(e, "example3_h", c.dual_ex3_h);
    }
    if (j.contains("penergy")) {
      const json& e = j.at("penergy");
      reject_unknown(e, {"eps_reg", "newton_tol", "max_iter"}, "penergy");
      take(e, "eps_reg", c.penergy.eps_reg);
      take(e, "newton_tol", c.penergy.newton_tol);
      take(e, "max_iter", c.penergy.max_iter);
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("config: {}", e.what()));
  }
  c.validate();
  return c;
}

json SuiteConfig::to_json() const {
  return {{"seed", seed},
          {"property_cases", property_cases},
          {"example1", {{"tau", ex1_tau}, {"T", ex1_T}}},
          {"example2", {{"u0", {ex2_u0_0, ex2_u0_1}}, {"tau", ex2_tau}, {"T", ex2_T}}},
          {"example3", {{"h", ex3_h}, {"tau", ex3_tau}, {"T", ex3_T}, {"uniform_tol", ex3_uniform_tol}}},
          {"sweep", {{"p", sweep_p}, {"tau", sweep_tau}, {"T", sweep_T}, {"interval_n", interval_n}}},
          {"resolvent", {{"p", resolvent_p}}},
          {"duality",
           {{"example1_t", dual_ex1_t},
            {"example1_tau", dual_ex1_tau},
            {"example3_t", dual_ex3_t},
            {"example3_tau", dual_ex3_tau},
            {"example3_h", dual_ex3_h}}},
          {"penergy",
           {{"eps_reg", penergy.eps_reg}, {"newton_tol", penergy.newton_tol}, {"max_iter", penergy.max_iter}}}};
}

void SuiteConfig::validate() const {
  if (property_cases < 100) throw InvalidArgument("config: property_cases must be at least 100");
  for (double tau : {ex1_tau, ex2_tau, ex3_tau, sweep_tau, dual_ex1_tau, dual_ex3_tau}) {
    if (!(tau > 0.0)) throw InvalidArgument("config: every tau must be positive");
  }
  if (!(ex1_T >= ex1_tau) || !(ex2_T >= ex2_tau) || !(ex3_T >= ex3_tau) || !(sweep_T >= sweep_tau)) {
    throw InvalidArgument("config: T must be at least tau");
  }
  if (!(ex3_h > 0.0 && ex3_h <= 0.5) || !(dual_ex3_h > 0.0 && dual_ex3_h <= 0.5)) {
    throw InvalidArgument("config: h must lie in (0, 0.5]");
  }
  if (!(dual_ex1_t > dual_ex1_tau) || !(dual_ex3_t > dual_ex3_tau)) {
    throw InvalidArgument("config: duality times must exceed one step");
  }
  if (interval_n < 1) throw InvalidArgument("config: interval_n must be positive");
  if (!(ex3_uniform_tol > 0.0)) throw InvalidArgument("config: example3.uniform_tol must be positive");
  for (const auto* ladder : {&sweep_p, &resolvent_p}) {
    if (ladder->size() < 2) throw InvalidArgument("config: p lists need at least two entries");
    for (std::size_t k = 0; k < ladder->size(); ++k) {
      if (!((*ladder)[k] >= 2.0) || (k > 0 && !((*ladder)[k] > (*ladder)[k - 1]))) {
        throw InvalidArgument("config: p lists must be increasing and >= 2");
      }
    }
  }
  PEnergyConfig pc = penergy;
  pc.validate();
}

bool CriterionRecord::pass() const {
  if (!error.empty() || parts.empty()) return false;
  for (const auto& p : parts) {
    if (!p.pass) return false;
  }
  return true;
}

std::string CriterionRecord::line() const {
  std::string s = fmt::format("criterion {} {}: {} ({:.2f} s)", id, name, pass() ? "PASS" : "FAIL", runtime_s);
  if (!error.empty()) s += fmt::format(" error: {}", error);
  for (const auto& p : parts) {
    s += fmt::format("; {} {:.3e} vs {:.3e}{}", p.id, p.measured, p.threshold, p.pass ? "" : " FAIL");
  }
  return s;
}

json to_json(const CriterionRecord& r) {
  json parts = json::array();
  for (const auto& p : r.parts) {
    parts.push_back({{"id", p.id},
                     {"description", p.description},
                     {"measured", p.measured},
                     {"threshold", p.threshold},
                     {"pass", p.pass}});
  }
  json j = {{"id", r.id},          {"name", r.name},       {"pass", r.pass()},
            {"runtime_s", r.runtime_s}, {"parts", parts}, {"details", r.details}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

CriterionRecord run_criterion(int id, const SuiteConfig& cfg) {
  if (id < 1 || id > 8) throw InvalidArgument(fmt::format("no criterion {}", id));
  const CriterionSpec& spec = kCriteria[id - 1];
  CriterionRecord r;
  r.id = id;
  r.name = spec.name;
  const auto start = std::chrono::steady_clock::now();
  try {
    spec.run(cfg, r);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (spec.runtime_limit > 0.0) {
    r.parts.push_back(at_most(fmt::format("{}-runtime", id), "runtime in seconds", r.runtime_s,
                              spec.runtime_limit));
  }
  return r;
}

bool SuiteReport::all_pass() const {
  for (const auto& r : records) {
    if (!r.pass()) return false;
  }
  return !records.empty();
}

json SuiteReport::to_json() const {
  json recs = json::array();
  for (const auto& r : records) recs.push_back(plimit::to_json(r));
  return {{"all_pass", all_pass()}, {"criteria", recs}};
}

SuiteReport run_suite(const SuiteConfig& cfg, const std::function<void(const CriterionRecord&)>& on_record) {
  cfg.validate();
  SuiteReport rep;
  for (int id = 1; id <= 8; ++id) {
    rep.records.push_back(run_criterion(id, cfg));
    if (on_record) on_record(rep.records.back());
  }
  return rep;
}

}  // namespace plimit
