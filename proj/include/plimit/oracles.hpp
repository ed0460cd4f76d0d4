#pragma once

// Exhaustive reference solvers for tiny instances. They share no code with
// the production solvers and are only meant for cross-checking them.

#include <Eigen/Core>

namespace plimit::oracles {

/// argmin sum sigma_i (v_i - g_i)^2 subject to |v_i - v_j| <= dist(i, j).
///
/// Enumerates every oriented forest of tight constraints, solves the
/// equality-constrained problem on each in closed form, and keeps the best
/// feasible candidate. Exponential; intended for B <= 6.
Eigen::VectorXd brute_force_projection(const Eigen::VectorXd& g, const Eigen::VectorXd& sigma,
                                       const Eigen::MatrixXd& dist);

/// min sum theta_ij dist(i, j) over couplings of mu and nu (both
/// nonnegative, equal mass), by enumerating the spanning trees of the
/// bipartite support graph. Intended for at most 4 + 4 support points.
double brute_force_transport(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                             const Eigen::MatrixXd& dist);

}  // namespace plimit::oracles
