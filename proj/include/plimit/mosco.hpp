#pragma once

// Computable checks of the convergence E_p -> E_inf: resolvents of E_p
// against the projection onto the Lipschitz set, and the upper bound of
// E_p along the constant recovery sequence.

#include <string>
#include <vector>

#include "plimit/fields.hpp"
#include "plimit/limitdyn.hpp"
#include "plimit/mesh.hpp"
#include "plimit/penergy.hpp"

namespace plimit {

struct MoscoCellFailure {
  std::size_t lambda_index = 0;
  std::size_t p_index = 0;
  std::string message;
};

struct MoscoReport {
  std::vector<double> lambdas;
  std::vector<double> p_ladder;
  /// L2(sigma) distance of prox_{lambda E_p}(g) to proj(g); rows are
  /// lambdas, columns p. NaN marks a failed cell.
  Eigen::MatrixXd resolvent_errors;
  /// Worst pairwise constraint violation of each prox output.
  Eigen::MatrixXd constraint_violations;
  std::vector<MoscoCellFailure> failures;
  BoundaryField projection;
  double projection_violation = 0.0;

  /// True when, in every row, the largest-p cell is the row minimum.
  bool last_column_minimal() const;
};

MoscoReport resolvent_convergence_test(const BoundaryField& g,
                                       const std::vector<double>& lambdas,
                                       const std::vector<double>& p_ladder,
                                       const DomainMesh& mesh, const GeodesicTable& geo,
                                       const PEnergyConfig& cfg);

struct LimsupRow {
  double p = 0.0;
  double energy = 0.0;
  double bound = 0.0;        // |Omega| / p
  double slack_bound = 0.0;  // bound * (1 + eps_h)^p
  double ratio = 0.0;        // energy * p / |Omega|
  bool within = false;
};

/// Relative overestimate of the true distance by the table, taken as the
/// worst boundary chord ratio minus one (zero in 1D).
double grid_metric_excess(const DomainMesh& mesh, const GeodesicTable& geo);

/// E_p(u) for each p of the ladder against |Omega|/p (1 + eps_h)^p.
/// Throws InvalidArgument if u is not feasible for geo.
std::vector<LimsupRow> limsup_condition_check(const BoundaryField& u,
                                              const std::vector<double>& p_ladder,
                                              const DomainMesh& mesh,
                                              const GeodesicTable& geo,
                                              const PEnergyConfig& cfg, double eps_h);

}  // namespace plimit
