#pragma once

// Canonical runs of the three worked examples: the limit flow next to its
// closed form, plus optional E_p flows for the p-sweep.

#include <array>
#include <vector>

#include <json.hpp>

#include "plimit/limitdyn.hpp"
#include "plimit/mesh.hpp"
#include "plimit/penergy.hpp"
#include "plimit/proxflow.hpp"

namespace plimit {

struct ExampleOptions {
  int id = 1;
  double tau = 1e-3;
  double T = 2.0;
  double h = 0.05;                       // example 3 only
  std::array<double, 2> u0{0.3, 0.0};    // example 2 only
  double uniform_tol = 1e-6;             // example 3 rate spread of the uniform phase
  std::vector<double> p_values;          // E_p flows to run, may be empty
  int interval_n = 4;
  PEnergyConfig penergy;

  static ExampleOptions preset(int id);
  void validate() const;
};

struct EpRun {
  double p = 0.0;
  Trajectory flow;
  double distance_to_limit = 0.0;  // sup_t L2(sigma)
};

struct ExampleRun {
  ExampleOptions options;
  DomainMesh mesh;
  GeodesicTable geo;
  SourceTerm source;
  Trajectory flow;   // limit flow
  Trajectory exact;  // closed form on the same grid
  std::vector<EpRun> ep;
  nlohmann::json summary;
};

/// Boundary positions of the bottom edge y = 0 of the unit square, without
/// the corner at x = 1, so that the sigma-measure is exactly 1.
std::vector<int> bottom_edge_gamma(const DomainMesh& mesh);

/// Start of the first step where u at boundary position pos grows faster
/// than rate_threshold; NaN if it never does.
double detect_slope_change(const Trajectory& traj, int pos, double rate_threshold);

/// First grid time at which every boundary value is positive; NaN if never.
double full_support_time(const Trajectory& traj);

/// First grid time after which, on every remaining step, all boundary
/// nodes move at the same rate up to rel_tol (relative spread). NaN if the
/// last step is not uniform.
double uniform_phase_onset(const Trajectory& traj, double rel_tol);

ExampleRun run_example(const ExampleOptions& options);

}  // namespace plimit
