#pragma once

// Discrete Monge-Kantorovich problems on the boundary with the geodesic
// cost, and the Kantorovich-potential check of the limit flow.

#include <cstddef>

#include "plimit/fields.hpp"
#include "plimit/mesh.hpp"
#include "plimit/proxflow.hpp"

namespace plimit {

/// Mass per boundary node, already integrated against sigma.
struct BoundaryMeasure {
  Eigen::VectorXd weights;
};

struct TransportPlan {
  Eigen::MatrixXd theta;  // theta(i, j): mass moved from node i to node j
  double cost = 0.0;
};

struct DualSolution {
  BoundaryField potential;  // normalized to min = 0
  double value = 0.0;
};

/// |sum(mu - nu)| must not exceed 1e-8 * sum|mu - nu| + 1e-12.
bool masses_balance(const Eigen::VectorXd& delta);

/// Optimal coupling of mu and nu for the cost geo.dist.
///
/// Mass common to mu and nu stays in place; the remainder is routed by
/// successive shortest paths on the bipartite residual graph with node
/// potentials. Optimality is certified against the dual value of the
/// 1-Lipschitz potential built from those node potentials. Throws
/// UnbalancedMasses or InfeasibleTolerance.
TransportPlan solve_primal(const BoundaryMeasure& mu, const BoundaryMeasure& nu,
                           const GeodesicTable& geo);

/// max sum_i v_i delta_i over |v_i - v_j| <= dist(i, j).
DualSolution solve_dual(const BoundaryMeasure& delta, const GeodesicTable& geo);

struct DualityReport {
  double time = 0.0;
  bool balanced = true;
  double imbalance = 0.0;
  /// Objective uses delta_i = sigma_i (f_i - du_i/dt).
  double value_at_u = 0.0;
  double value_opt = 0.0;
  double relative_gap = 0.0;
  /// Same quantities for the opposite sign, delta_i = sigma_i (du_i/dt - f_i).
  double opposite_value_at_u = 0.0;
  double opposite_value_opt = 0.0;
  double opposite_relative_gap = 0.0;
  double feasibility_violation = 0.0;
  BoundaryField potential;
};

/// Checks that the state at traj.times[t_index] maximizes the dual
/// transport objective for delta = sigma (f - du/dt), with du/dt the
/// central difference. Unbalanced delta is reported, not thrown.
DualityReport verify_potential(const Trajectory& traj, const SourceTerm& f,
                               const GeodesicTable& geo, const Eigen::VectorXd& sigma,
                               std::size_t t_index);

}  // namespace plimit
