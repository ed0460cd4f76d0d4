#pragma once

// Discrete p-Dirichlet energy on P1 elements: value, trace-constrained
// minimal extension, and the proximal map of the boundary functional.

#include <cstdint>
#include <vector>

#include "plimit/fields.hpp"
#include "plimit/mesh.hpp"

namespace plimit {

struct PEnergyConfig {
  double p = 2.0;
  /// |grad v|^2 is replaced by |grad v|^2 + eps_reg^2 inside the power.
  double eps_reg = 1e-8;
  /// Max-norm of the free gradient components at which Newton stops.
  double newton_tol = 1e-10;
  int max_iter = 200;
  /// Exponent ladder ending at p. Empty means 2, 4, 8, ... , p.
  std::vector<double> continuation;

  void validate() const;
  std::vector<double> ladder() const;
};

/// Returns a copy of cfg with p replaced and the ladder reset to default.
PEnergyConfig with_exponent(const PEnergyConfig& cfg, double p);

/// sum_T |T| (1/p) (|grad v_T|^2 + eps^2)^{p/2}
double discrete_energy(const DomainMesh& mesh, const InteriorField& v,
                       const PEnergyConfig& cfg);

/// Analytic gradient of discrete_energy with respect to every node value.
Eigen::VectorXd energy_gradient(const DomainMesh& mesh, const InteriorField& v,
                                const PEnergyConfig& cfg);

struct ExtensionResult {
  InteriorField field;
  double residual = 0.0;
  int iterations = 0;
};

/// Minimizes discrete_energy over interior values with the boundary pinned
/// to u. Throws NonConvergence when the last ladder stage hits max_iter.
/// A warm start skips the continuation ladder unless the direct solve fails.
ExtensionResult p_extension(const DomainMesh& mesh, const BoundaryField& u,
                            const PEnergyConfig& cfg,
                            const InteriorField* warm_start = nullptr);

/// discrete_energy of the minimal extension of u.
double energy_Ep(const DomainMesh& mesh, const BoundaryField& u,
                 const PEnergyConfig& cfg);

struct ProxResult {
  BoundaryField trace;
  InteriorField field;
  double residual = 0.0;
  int iterations = 0;
};

/// Resolvent (I + lambda dE_p)^{-1} g: the trace of the minimizer over all
/// node values of discrete_energy(v) + (1/(2 lambda)) sum_i sigma_i (v_i - g_i)^2.
ProxResult prox_Ep(const DomainMesh& mesh, const BoundaryField& g, double lambda,
                   const PEnergyConfig& cfg,
                   const InteriorField* warm_start = nullptr);

/// Max relative discrepancy between energy_gradient and central finite
/// differences at `samples` random coordinates. Requires eps_reg > 0.
/// The relative error of each coordinate is taken against
/// max(|analytic|, |fd|, 1e-6 * max|gradient|).
double gradient_check(const DomainMesh& mesh, const InteriorField& v,
                      const PEnergyConfig& cfg, std::uint64_t seed = 7,
                      int samples = 20);

}  // namespace plimit
