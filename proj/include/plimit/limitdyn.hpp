#pragma once

// The p = infinity side: projection onto the pairwise-Lipschitz set and the
// closed-form limit solutions used as oracles.

#include <span>
#include <vector>

#include "plimit/fields.hpp"
#include "plimit/mesh.hpp"

namespace plimit {

/// {v : |v_i - v_j| <= dist(i, j) for all boundary pairs}. Contains the
/// constants, closed and convex.
struct LipschitzConstraintSet {
  GeodesicTable geodesic;
  /// Accepted pairwise violation of a projected point.
  double tolerance = 0.0;
};

/// Tolerance defaults to 1e-8 * max distance.
LipschitzConstraintSet make_constraint_set(GeodesicTable geo);

/// max over pairs of (|v_i - v_j| - dist(i, j))_+
double max_violation(const Eigen::VectorXd& v, const GeodesicTable& geo);

struct ProjectionOptions {
  /// Stop once, within a cycle, no single update moves the iterate by more
  /// than change_tol * max(1, max|g|), the point is feasible, and the
  /// complementary-slackness gap sum_k (d_k |y_k| - y_k (x_i - x_j)) is at
  /// most gap_tol * max(1, sum sigma g^2). The gap bounds half the squared
  /// sigma-distance to the exact projection.
  double change_tol = 1e-10;
  double gap_tol = 1e-13;
  int max_cycles = 200000;
  /// Cycles between attempts of the exact active-set finish when the
  /// cyclic sweep has not certified convergence on its own.
  int finish_every = 50;
};

struct ProjectionResult {
  BoundaryField point;
  int cycles = 0;
  double worst_violation = 0.0;
  double gap = 0.0;
};

/// Cyclic Dykstra over the B(B-1)/2 slab constraints in the
/// sigma-weighted inner product.
///
/// Each slab is a two-variable set, so the Dykstra correction of a pair is
/// a single signed multiplier y_ij and the iterate is
/// x = g - diag(sigma)^{-1} sum_ij y_ij (e_i - e_j). The multipliers are
/// kept between calls: a new projection starts from the previous dual
/// point, which is still a valid starting point for the dual coordinate
/// ascent that Dykstra performs. reset() clears them.
class LipschitzProjector {
 public:
  LipschitzProjector(LipschitzConstraintSet set, Eigen::VectorXd sigma,
                     ProjectionOptions options = {});

  ProjectionResult project(const BoundaryField& g);
  void reset();

  const LipschitzConstraintSet& constraint_set() const { return set_; }
  const Eigen::VectorXd& sigma() const { return sigma_; }

 private:
  bool finish_active_set(const Eigen::VectorXd& g, Eigen::VectorXd& x);

  struct Pair {
    int i;
    int j;
    double dist;
    double weight;  // 1/sigma_i + 1/sigma_j
  };

  LipschitzConstraintSet set_;
  Eigen::VectorXd sigma_;
  Eigen::VectorXd inv_sigma_;
  ProjectionOptions options_;
  std::vector<Pair> pairs_;
  std::vector<double> multipliers_;
};

/// argmin sum_i sigma_i (v_i - g_i)^2 over the constraint set. Throws
/// MaxIterations if the cycle cap is reached.
BoundaryField project_Ainf(const BoundaryField& g, const LipschitzConstraintSet& set,
                           const Eigen::VectorXd& sigma);

/// Interval (0,1), f = (0, 1), u0 = 0. Values at (x = 0, x = 1).
BoundaryField example1_exact(double t);

/// Same source with initial data (u0(0), u0(1)), |u0(1) - u0(0)| <= 1.
BoundaryField example2_exact(double u0_at_0, double u0_at_1, double t);

/// Switch time t0 = u0(0) - u0(1) + 1 of example2_exact.
double example2_switch_time(double u0_at_0, double u0_at_1);

/// Sandpile growth from a source set Gamma on the boundary.
///
/// With d_i the distance of boundary node i to Gamma, the level measure is
/// m(a) = sum_{d_i < a} sigma_i and a(t) inverts
/// t(a) = (1/|Gamma|) int_0^a m(s) ds = (1/|Gamma|) sum_i sigma_i (a - d_i)_+.
struct SandpileState {
  std::vector<int> gamma;          // boundary positions of the source set
  double gamma_mass = 0.0;         // sum of sigma over gamma
  double total_measure = 0.0;      // sum of sigma
  Eigen::VectorXd sigma;
  Eigen::VectorXd dist_to_gamma;   // per boundary node
  std::vector<double> levels;      // sorted distinct distances
  std::vector<double> level_mass;  // m(a) for a in (levels[k], levels[k+1]]

  double max_distance() const { return levels.back(); }
  /// m(a), left-continuous.
  double level_measure(double a) const;
  double time_of_level(double a) const;
  /// Inverse of time_of_level (bisection to 1e-10 below the saturation
  /// level, closed form above it).
  double level_at_time(double t) const;
  /// First time at which the support is the whole boundary.
  double saturation_time() const { return time_of_level(max_distance()); }
};

SandpileState make_sandpile_state(const DomainMesh& mesh,
                                  std::span<const int> gamma_positions);

/// (a(t) - d(x_i, Gamma))_+ at every boundary node.
BoundaryField sandpile_exact(const SandpileState& state, double t);

/// |Gamma| / |boundary|
double uniform_phase_speed(const SandpileState& state);

/// Number of connected runs of {u > threshold} along the boundary cycle.
int support_components(const DomainMesh& mesh, const BoundaryField& u,
                       double threshold = 0.0);

}  // namespace plimit
