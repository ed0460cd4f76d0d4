#include "plimit/mosco.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "plimit/error.hpp"

namespace plimit {

namespace {

void check_ladder(const std::vector<double>& p_ladder) {
  if (p_ladder.empty()) throw InvalidArgument("p ladder is empty");
  for (std::size_t k = 0; k < p_ladder.size(); ++k) {
    if (!(p_ladder[k] >= 2.0)) throw InvalidArgument("every p must be at least 2");
    if (k > 0 && !(p_ladder[k] > p_ladder[k - 1])) {
      throw InvalidArgument("p ladder must be strictly increasing");
    }
  }
}

}  // namespace

bool MoscoReport::last_column_minimal() const {
  const Eigen::Index last = resolvent_errors.cols() - 1;
  for (Eigen::Index r = 0; r < resolvent_errors.rows(); ++r) {
    const double tail = resolvent_errors(r, last);
    if (std::isnan(tail)) return false;
    for (Eigen::Index c = 0; c < last; ++c) {
      if (resolvent_errors(r, c) < tail) return false;
    }
  }
  return true;
}

MoscoReport resolvent_convergence_test(const BoundaryField& g,
                                       const std::vector<double>& lambdas,
                                       const std::vector<double>& p_ladder,
                                       const DomainMesh& mesh, const GeodesicTable& geo,
                                       const PEnergyConfig& cfg) {
  check_ladder(p_ladder);
  if (lambdas.empty()) throw InvalidArgument("lambda list is empty");
  for (double l : lambdas) {
    if (!(l > 0.0)) throw InvalidArgument("every lambda must be positive");
  }
  if (g.size() != static_cast<Eigen::Index>(mesh.boundary_count())) {
    throw InvalidArgument("boundary field size does not match the mesh");
  }
  const Eigen::VectorXd sigma = mesh.sigma();
  const LipschitzConstraintSet set = make_constraint_set(geo);

  MoscoReport rep;
  rep.lambdas = lambdas;
  rep.p_ladder = p_ladder;
  rep.projection = project_Ainf(g, set, sigma);
  rep.projection_violation = std::max(0.0, max_violation(rep.projection.values, geo));
  const auto nl = static_cast<Eigen::Index>(lambdas.size());
  const auto np = static_cast<Eigen::Index>(p_ladder.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.resolvent_errors = Eigen::MatrixXd::Constant(nl, np, nan);
  rep.constraint_violations = Eigen::MatrixXd::Constant(nl, np, nan);

  for (Eigen::Index r = 0; r < nl; ++r) {
    for (Eigen::Index c = 0; c < np; ++c) {
      try {
        const ProxResult prox = prox_Ep(mesh, g, lambdas[r], with_exponent(cfg, p_ladder[c]));
        rep.resolvent_errors(r, c) = weighted_l2(prox.trace.values - rep.projection.values, sigma);
        rep.constraint_violations(r, c) =
            std::max(0.0, max_violation(prox.trace.values, geo));
      } catch (const Error& e) {
        rep.failures.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c),
                                e.what()});
      }
    }
  }
  return rep;
}

double grid_metric_excess(const DomainMesh& mesh, const GeodesicTable& geo) {
  if (mesh.dim() == 1) return 0.0;
  return std::max(0.0, max_chord_ratio(mesh, geo) - 1.0);
}

std::vector<LimsupRow> limsup_condition_check(const BoundaryField& u,
                                              const std::vector<double>& p_ladder,
                                              const DomainMesh& mesh,
                                              const GeodesicTable& geo,
                                              const PEnergyConfig& cfg, double eps_h) {
  check_ladder(p_ladder);
  if (!(eps_h >= 0.0)) throw InvalidArgument("eps_h must be nonnegative");
  if (u.size() != static_cast<Eigen::Index>(geo.size())) {
    throw InvalidArgument("boundary field size does not match the geodesic table");
  }
  const double viol = max_violation(u.values, geo);
  if (viol > make_constraint_set(geo).tolerance) {
    throw InvalidArgument(fmt::format("u is not Lipschitz-feasible (violation {:.3e})", viol));
  }
  const double omega = mesh.volume();
  std::vector<LimsupRow> rows;
  InteriorField warm;
  for (double p : p_ladder) {
    const PEnergyConfig c = with_exponent(cfg, p);
    const ExtensionResult ext = p_extension(mesh, u, c, warm.size() > 0 ? &warm : nullptr);
    warm = ext.field;
    LimsupRow row;
    row.p = p;
    row.energy = discrete_energy(mesh, ext.field, c);
    row.bound = omega / p;
    row.slack_bound = row.bound * std::pow(1.0 + eps_h, p) * (1.0 + 1e-9);
    row.ratio = row.energy * p / omega;
    row.within = row.energy <= row.slack_bound;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace plimit
