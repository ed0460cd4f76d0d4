#pragma once

// Implicit Euler (minimizing movements) for u_t + dPsi(u) ∋ f on boundary
// fields, trajectory comparison and a-priori bound diagnostics.

#include <functional>
#include <vector>

#include "plimit/fields.hpp"
#include "plimit/limitdyn.hpp"
#include "plimit/mesh.hpp"
#include "plimit/penergy.hpp"

namespace plimit {

enum class TimeRegularity { PiecewiseConstant, Continuous };

struct SourceTerm {
  std::function<BoundaryField(double)> evaluate;
  TimeRegularity regularity = TimeRegularity::PiecewiseConstant;

  BoundaryField operator()(double t) const { return evaluate(t); }
};

/// Time-independent source.
SourceTerm constant_source(BoundaryField f);

/// sup_t sum_i sigma_i |f_i(t)| + sum_i sigma_i |df_i/dt(t)| sampled on the
/// given times (time derivative by backward differences).
double source_constant(const SourceTerm& f, const Eigen::VectorXd& sigma,
                       const std::vector<double>& times);

struct StepMeta {
  double residual = 0.0;
  int iterations = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<BoundaryField> states;
  /// step_meta[k] describes the solve producing states[k]; entry 0 is empty.
  std::vector<StepMeta> step_meta;

  std::size_t size() const { return times.size(); }
  void validate() const;
};

struct ResolventOutput {
  BoundaryField state;
  double residual = 0.0;
  int iterations = 0;
};

/// (g, lambda) -> (I + lambda dPsi)^{-1} g
using Resolvent = std::function<ResolventOutput(const BoundaryField&, double)>;

/// Resolvent of dE_p via prox_Ep. Keeps the last interior field as a warm
/// start, so a single instance must not be shared across threads.
Resolvent ep_resolvent(const DomainMesh& mesh, PEnergyConfig cfg);

/// Resolvent of the indicator of the Lipschitz set: the projection, for any
/// lambda. Keeps Dykstra multipliers between steps.
Resolvent einf_resolvent(LipschitzConstraintSet set, Eigen::VectorXd sigma,
                         ProjectionOptions options = {});

/// u^{k+1} = resolvent(u^k + tau_k f(t_{k+1}), tau_k) on a uniform grid of
/// step tau, the last step shortened to end exactly at T.
Trajectory evolve(const Resolvent& resolvent, const BoundaryField& u0,
                  const SourceTerm& f, double T, double tau);

/// sum_i sigma_i u^K_i - sum_i sigma_i u^0_i - sum_k tau_k sum_i sigma_i f_i(t_{k+1})
double mass_balance_residual(const Trajectory& traj, const Eigen::VectorXd& sigma,
                             const SourceTerm& f);

struct BoundsReport {
  double sup_abs_u = 0.0;
  double time_integral_ut_sq = 0.0;
  /// (sum_k tau_k * p * E_p(u^k))^{1/p}, the discrete (int int |grad u|^p)^{1/p}
  double grad_p_norm = 0.0;
  double mass_balance_residual = 0.0;
};

BoundsReport diagnostics(const Trajectory& traj, const DomainMesh& mesh,
                         const PEnergyConfig& cfg, const SourceTerm& f);

/// max_k (sum_i sigma_i (a_i^k - b_i^k)^2)^{1/2}
double compare_trajectories(const Trajectory& a, const Trajectory& b,
                            const Eigen::VectorXd& sigma);

}  // namespace plimit
