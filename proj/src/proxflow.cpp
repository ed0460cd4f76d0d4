#include "plimit/proxflow.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "plimit/error.hpp"

namespace plimit {

SourceTerm constant_source(BoundaryField f) {
  return {[f = std::move(f)](double) { return f; }, TimeRegularity::PiecewiseConstant};
}

double source_constant(const SourceTerm& f, const Eigen::VectorXd& sigma,
                       const std::vector<double>& times) {
  double c = 0.0;
  BoundaryField prev;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const BoundaryField cur = f(times[k]);
    double v = (sigma.array() * cur.values.array().abs()).sum();
    if (k > 0 && times[k] > times[k - 1]) {
      v += (sigma.array() * (cur.values - prev.values).array().abs()).sum() /
           (times[k] - times[k - 1]);
    }
    c = std::max(c, v);
    prev = cur;
  }
  return c;
}

void Trajectory::validate() const {
  if (times.size() != states.size() || times.size() != step_meta.size()) {
    throw InvalidArgument("trajectory times, states and metadata differ in length");
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw InvalidArgument("trajectory times must be strictly increasing");
    }
    if (!states[k].values.allFinite()) throw InvalidArgument("trajectory state is not finite");
    if (states[k].size() != states[0].size()) {
      throw InvalidArgument("trajectory states differ in size");
    }
  }
}

Resolvent ep_resolvent(const DomainMesh& mesh, PEnergyConfig cfg) {
  cfg.validate();
  auto warm = std::make_shared<InteriorField>();
  return [&mesh, cfg, warm](const BoundaryField& g, double lambda) {
    const bool have = warm->size() == static_cast<Eigen::Index>(mesh.node_count());
    ProxResult r = prox_Ep(mesh, g, lambda, cfg, have ? warm.get() : nullptr);
    *warm = r.field;
    return ResolventOutput{std::move(r.trace), r.residual, r.iterations};
  };
}

Resolvent einf_resolvent(LipschitzConstraintSet set, Eigen::VectorXd sigma,
                         ProjectionOptions options) {
  auto projector =
      std::make_shared<LipschitzProjector>(std::move(set), std::move(sigma), options);
  return [projector](const BoundaryField& g, double /*lambda*/) {
    ProjectionResult r = projector->project(g);
    return ResolventOutput{std::move(r.point), r.worst_violation, r.cycles};
  };
}

Trajectory evolve(const Resolvent& resolvent, const BoundaryField& u0, const SourceTerm& f,
                  double T, double tau) {
  if (!(T > 0.0) || !(tau > 0.0)) throw InvalidArgument("T and tau must be positive");
  if (tau > T) throw InvalidArgument("tau must not exceed T");
  if (!u0.values.allFinite()) throw InvalidArgument("initial data are not finite");

  const auto steps = static_cast<long>(std::ceil(T / tau - 1e-9));
  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(u0);
  traj.step_meta.push_back({});
  for (long k = 0; k < steps; ++k) {
    const double t_next = k + 1 == steps ? T : static_cast<double>(k + 1) * tau;
    const double dt = t_next - traj.times.back();
    const BoundaryField src = f(t_next);
    if (src.size() != u0.size()) throw InvalidArgument("source size does not match the state");
    BoundaryField g{traj.states.back().values + dt * src.values};
    ResolventOutput out;
    try {
      out = resolvent(g, dt);
    } catch (const NonConvergence& e) {
      throw NonConvergence(e.residual(), e.iterations(),
                           fmt::format("evolve step {} (t = {})", k + 1, t_next));
    } catch (const MaxIterations& e) {
      throw MaxIterations(e.worst_violation(), e.cycles(),
                          fmt::format("evolve step {} (t = {})", k + 1, t_next));
    }
    traj.times.push_back(t_next);
    traj.states.push_back(std::move(out.state));
    traj.step_meta.push_back({out.residual, out.iterations});
  }
  return traj;
}

double mass_balance_residual(const Trajectory& traj, const Eigen::VectorXd& sigma,
                             const SourceTerm& f) {
  traj.validate();
  double injected = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    injected += (traj.times[k] - traj.times[k - 1]) * sigma.dot(f(traj.times[k]).values);
  }
  return sigma.dot(traj.states.back().values) - sigma.dot(traj.states.front().values) - injected;
}

BoundsReport diagnostics(const Trajectory& traj, const DomainMesh& mesh,
                         const PEnergyConfig& cfg, const SourceTerm& f) {
  traj.validate();
  if (traj.states.front().size() != static_cast<Eigen::Index>(mesh.boundary_count())) {
    throw InvalidArgument("trajectory does not match the mesh boundary");
  }
  const Eigen::VectorXd sigma = mesh.sigma();
  BoundsReport r;
  for (const auto& s : traj.states) r.sup_abs_u = std::max(r.sup_abs_u, s.values.cwiseAbs().maxCoeff());

  double grad_sum = 0.0;
  InteriorField warm;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double dt = traj.times[k] - traj.times[k - 1];
    const Eigen::VectorXd ut = (traj.states[k].values - traj.states[k - 1].values) / dt;
    r.time_integral_ut_sq += dt * (sigma.array() * ut.array().square()).sum();
    const auto ext = p_extension(mesh, traj.states[k], cfg, warm.size() > 0 ? &warm : nullptr);
    warm = ext.field;
    grad_sum += dt * cfg.p * discrete_energy(mesh, ext.field, cfg);
  }
  r.grad_p_norm = std::pow(grad_sum, 1.0 / cfg.p);
  r.mass_balance_residual = mass_balance_residual(traj, sigma, f);
  return r;
}

double compare_trajectories(const Trajectory& a, const Trajectory& b,
                            const Eigen::VectorXd& sigma) {
  if (a.times.size() != b.times.size()) throw InvalidArgument("trajectory time grids differ");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    if (std::abs(a.times[k] - b.times[k]) > 1e-12 * std::max(1.0, std::abs(a.times[k]))) {
      throw InvalidArgument("trajectory time grids differ");
    }
    if (a.states[k].size() != sigma.size() || b.states[k].size() != sigma.size()) {
      throw InvalidArgument("trajectory node sets differ");
    }
    worst = std::max(worst, weighted_l2(a.states[k].values - b.states[k].values, sigma));
  }
  return worst;
}

}  // namespace plimit
