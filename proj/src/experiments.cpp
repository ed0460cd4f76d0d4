#include "plimit/experiments.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "plimit/error.hpp"

namespace plimit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Trajectory exact_on_grid(const Trajectory& flow, const std::function<BoundaryField(double)>& exact) {
  Trajectory out;
  out.times = flow.times;
  out.step_meta.assign(flow.times.size(), {});
  for (double t : flow.times) out.states.push_back(exact(t));
  return out;
}

double sup_error(const Trajectory& a, const Trajectory& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, (a.states[k].values - b.states[k].values).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

ExampleOptions ExampleOptions::preset(int id) {
  ExampleOptions o;
  o.id = id;
  switch (id) {
    case 1:
      o.tau = 1e-3;
      o.T = 2.0;
      break;
    case 2:
      o.tau = 1e-3;
      o.T = 3.0;
      break;
    case 3:
      o.tau = 1e-2;
      o.T = 3.0;
      break;
    default:
      throw InvalidArgument(fmt::format("unknown example id {}", id));
  }
  return o;
}

void ExampleOptions::validate() const {
  if (id < 1 || id > 3) throw InvalidArgument(fmt::format("unknown example id {}", id));
  if (!(tau > 0.0) || !(T >= tau)) throw InvalidArgument("need tau > 0 and T >= tau");
  if (id == 3 && !(h > 0.0 && h <= 0.5)) throw InvalidArgument("h must lie in (0, 0.5]");
  if (id == 2 && std::abs(u0[0] - u0[1]) > 1.0) {
    throw InvalidArgument("example 2 needs |u0(1) - u0(0)| <= 1");
  }
  if (interval_n < 1) throw InvalidArgument("interval_n must be positive");
  if (!(uniform_tol > 0.0)) throw InvalidArgument("uniform_tol must be positive");
  for (double p : p_values) {
    if (!(p >= 2.0)) throw InvalidArgument("every p must be at least 2");
  }
  penergy.validate();
}

std::vector<int> bottom_edge_gamma(const DomainMesh& mesh) {
  std::vector<int> gamma;
  const auto& bn = mesh.boundary_nodes();
  const auto& w = mesh.boundary_weights();
  for (std::size_t b = 0; b < bn.size(); ++b) {
    const Point& x = mesh.nodes()[bn[b]];
    // A node belongs to the half-open edge [0, 1) x {0} when its
    // quadrature cell lies left of x = 1.
    if (std::abs(x.y()) < 1e-12 && x.x() + 0.5 * w[b] < 1.0 - 1e-12) {
      gamma.push_back(static_cast<int>(b));
    }
  }
  return gamma;
}

double detect_slope_change(const Trajectory& traj, int pos, double rate_threshold) {
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double rate = (traj.states[k][pos] - traj.states[k - 1][pos]) /
                        (traj.times[k] - traj.times[k - 1]);
    if (rate > rate_threshold) return traj.times[k - 1];
  }
  return kNaN;
}

double full_support_time(const Trajectory& traj) {
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if ((traj.states[k].values.array() > 0.0).all()) return traj.times[k];
  }
  return kNaN;
}

double uniform_phase_onset(const Trajectory& traj, double rel_tol) {
  double onset = kNaN;
  for (std::size_t k = traj.size() - 1; k >= 1; --k) {
    const Eigen::VectorXd rate =
        (traj.states[k].values - traj.states[k - 1].values) / (traj.times[k] - traj.times[k - 1]);
    const double mean = rate.mean();
    if (!(rate.maxCoeff() - rate.minCoeff() <= rel_tol * std::abs(mean))) break;
    onset = traj.times[k - 1];
  }
  return onset;
}

ExampleRun run_example(const ExampleOptions& options) {
  options.validate();
  ExampleRun run;
  run.options = options;
  nlohmann::json& s = run.summary;
  s["id"] = options.id;
  s["tau"] = options.tau;
  s["T"] = options.T;

  if (options.id == 3) {
    const auto square = unit_square();
    run.mesh = build_polygon_mesh(square, options.h);
    s["h"] = options.h;
  } else {
    run.mesh = build_interval_mesh(options.interval_n);
  }
  run.geo = boundary_pairwise_distances(run.mesh);
  const Eigen::VectorXd sigma = run.mesh.sigma();
  const auto B = static_cast<Eigen::Index>(run.mesh.boundary_count());

  BoundaryField u0{Eigen::VectorXd::Zero(B)};
  SandpileState pile;
  if (options.id == 3) {
    const auto gamma = bottom_edge_gamma(run.mesh);
    pile = make_sandpile_state(run.mesh, gamma);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(B);
    for (int g : gamma) f[g] = 1.0;
    run.source = constant_source(BoundaryField{f});
  } else {
    Eigen::VectorXd f(2);
    f << 0.0, 1.0;
    run.source = constant_source(BoundaryField{f});
    if (options.id == 2) u0.values << options.u0[0], options.u0[1];
  }

  run.flow = evolve(einf_resolvent(make_constraint_set(run.geo), sigma), u0, run.source,
                    options.T, options.tau);
  switch (options.id) {
    case 1:
      run.exact = exact_on_grid(run.flow, example1_exact);
      break;
    case 2:
      run.exact = exact_on_grid(run.flow, [&](double t) {
        return example2_exact(options.u0[0], options.u0[1], t);
      });
      break;
    default:
      run.exact = exact_on_grid(run.flow, [&](double t) { return sandpile_exact(pile, t); });
  }

  const double err = sup_error(run.flow, run.exact);
  s["sup_error"] = err;
  s["mass_balance_residual"] = mass_balance_residual(run.flow, sigma, run.source);

  if (options.id == 1) {
    s["sup_error_threshold"] = 5.0 * options.tau;
    s["pass"] = err <= 5.0 * options.tau;
    const std::size_t last = run.flow.size() - 1;
    const double t1 = run.flow.times[last - 1], t2 = run.flow.times[last];
    s["late_slope"] = (run.flow.states[last][1] - run.flow.states[last - 1][1]) / (t2 - t1);
  } else if (options.id == 2) {
    const double t0 = example2_switch_time(options.u0[0], options.u0[1]);
    // Node x = 0 is at rest before the switch and grows with slope 1/2 after.
    const double detected = detect_slope_change(run.flow, 0, 0.25);
    s["switch_time_expected"] = t0;
    s["switch_time_detected"] = detected;
    s["switch_time_error"] = std::abs(detected - t0);
    s["pass"] = std::abs(detected - t0) <= options.tau * (1.0 + 1e-9);
  } else {
    double mass_err = 0.0;
    for (std::size_t k = 1; k < run.flow.size(); ++k) {
      const double injected = run.flow.times[k] * pile.gamma_mass;
      mass_err = std::max(mass_err, std::abs(sigma.dot(run.flow.states[k].values) - injected) / injected);
    }
    const double speed = uniform_phase_speed(pile);
    const double t_full = full_support_time(run.flow);
    const double onset = uniform_phase_onset(run.flow, options.uniform_tol);
    double speed_err = kNaN;
    if (std::isfinite(onset)) {
      std::size_t a = 0;
      while (run.flow.times[a] < onset) ++a;
      const std::size_t b = run.flow.size() - 1;
      const Eigen::VectorXd rate = (run.flow.states[b].values - run.flow.states[a].values) /
                                   (run.flow.times[b] - run.flow.times[a]);
      speed_err = (rate.array() - speed).abs().maxCoeff() / speed;
    }
    s["gamma_measure"] = pile.gamma_mass;
    s["boundary_measure"] = pile.total_measure;
    s["sup_error_threshold"] = 0.05;
    s["mass_identity_relative_error"] = mass_err;
    s["uniform_speed_expected"] = speed;
    s["full_support_time_flow"] = t_full;
    s["full_support_time_formula"] = pile.saturation_time();
    s["uniform_phase_onset_flow"] = onset;
    s["uniform_speed_relative_error"] = speed_err;
    s["pass"] = err <= 0.05 && mass_err <= 0.01 && speed_err <= 0.02;
  }

  for (double p : options.p_values) {
    EpRun ep;
    ep.p = p;
    ep.flow = evolve(ep_resolvent(run.mesh, with_exponent(options.penergy, p)), u0, run.source,
                     options.T, options.tau);
    ep.distance_to_limit = compare_trajectories(ep.flow, run.flow, sigma);
    s["ep_distance_to_limit"][fmt::format("{}", p)] = ep.distance_to_limit;
    run.ep.push_back(std::move(ep));
  }
  return run;
}

}  // namespace plimit
