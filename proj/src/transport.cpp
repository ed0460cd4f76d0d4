#include "plimit/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "plimit/error.hpp"

namespace plimit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_table(const GeodesicTable& geo, Eigen::Index n) {
  if (geo.dist.rows() != n || geo.dist.cols() != n) {
    throw InvalidArgument("measure size does not match the geodesic table");
  }
  const double tol = 1e-9 * std::max(1.0, geo.dist.size() > 0 ? geo.dist.maxCoeff() : 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        if (geo.dist(i, k) > geo.dist(i, j) + geo.dist(j, k) + tol) {
          throw InvalidArgument("geodesic table violates the triangle inequality");
        }
      }
    }
  }
}

struct FlowSolution {
  std::vector<int> sources;
  std::vector<int> sinks;
  Eigen::MatrixXd flow;       // sources x sinks
  Eigen::VectorXd potential;  // 1-Lipschitz, defined on every node
  double cost = 0.0;
};

// Routes the positive part of delta to its negative part.
FlowSolution route(const Eigen::VectorXd& delta, const Eigen::MatrixXd& dist) {
  FlowSolution sol;
  const Eigen::Index n = delta.size();
  const double total = delta.cwiseAbs().sum();
  const double eps = 1e-14 * std::max(total, 1e-300);
  std::vector<double> supply, demand;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (delta[i] > eps) {
      sol.sources.push_back(static_cast<int>(i));
      supply.push_back(delta[i]);
    } else if (delta[i] < -eps) {
      sol.sinks.push_back(static_cast<int>(i));
      demand.push_back(-delta[i]);
    }
  }
  const int ns = static_cast<int>(sol.sources.size());
  const int nk = static_cast<int>(sol.sinks.size());
  sol.flow = Eigen::MatrixXd::Zero(ns, nk);
  sol.potential = Eigen::VectorXd::Zero(n);
  if (ns == 0 || nk == 0) return sol;

  auto cost = [&](int s, int k) { return dist(sol.sources[s], sol.sinks[k]); };
  // Bipartite graph: nodes [0, ns) are sources, [ns, ns + nk) sinks.
  const int nn = ns + nk;
  std::vector<double> pot(nn, 0.0), d(nn);
  std::vector<int> prev(nn);
  std::vector<char> done(nn);
  const int max_aug = 10 * nn * nn + 100;
  int aug = 0;
  auto remaining = [&](const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [&](double x) { return x > eps; });
  };
  while (remaining(supply) && remaining(demand)) {
    if (++aug > max_aug) throw InfeasibleTolerance(kInf, 0.0);
    std::fill(d.begin(), d.end(), kInf);
    std::fill(prev.begin(), prev.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (int s = 0; s < ns; ++s) {
      if (supply[s] > eps) d[s] = 0.0;
    }
    int target = -1;
    for (;;) {
      int u = -1;
      for (int v = 0; v < nn; ++v) {
        if (!done[v] && d[v] < kInf && (u < 0 || d[v] < d[u])) u = v;
      }
      if (u < 0) break;
      done[u] = 1;
      if (u >= ns && demand[u - ns] > eps) {
        target = u;
        break;
      }
      if (u < ns) {
        for (int k = 0; k < nk; ++k) {
          const int v = ns + k;
          if (done[v]) continue;
          const double nd = d[u] + std::max(0.0, cost(u, k) + pot[u] - pot[v]);
          if (nd < d[v]) {
            d[v] = nd;
            prev[v] = u;
          }
        }
      } else {
        const int k = u - ns;
        for (int s = 0; s < ns; ++s) {
          if (done[s] || sol.flow(s, k) <= 0.0) continue;
          const double nd = d[u] + std::max(0.0, -cost(s, k) + pot[u] - pot[s]);
          if (nd < d[s]) {
            d[s] = nd;
            prev[s] = u;
          }
        }
      }
    }
    if (target < 0) throw InfeasibleTolerance(kInf, 0.0);
    const double reach = d[target];
    for (int v = 0; v < nn; ++v) pot[v] += std::min(d[v], reach);

    double push = demand[target - ns];
    int v = target;
    while (prev[v] >= 0) {
      const int u = prev[v];
      if (u >= ns) push = std::min(push, sol.flow(v, u - ns));  // backward arc
      v = u;
    }
    const int root = v;
    push = std::min(push, supply[root]);

    v = target;
    while (prev[v] >= 0) {
      const int u = prev[v];
      if (u < ns) {
        sol.flow(u, v - ns) += push;
      } else {
        double& f = sol.flow(v, u - ns);
        f = f - push <= eps ? 0.0 : f - push;
      }
      v = u;
    }
    supply[root] = supply[root] - push <= eps ? 0.0 : supply[root] - push;
    double& dem = demand[target - ns];
    dem = dem - push <= eps ? 0.0 : dem - push;
  }

  for (int s = 0; s < ns; ++s) {
    for (int k = 0; k < nk; ++k) sol.cost += sol.flow(s, k) * cost(s, k);
  }
  // Source prices alpha_s = -pot_s satisfy alpha_s - beta_k <= d_sk with
  // equality on used arcs; their d-transform is an optimal 1-Lipschitz
  // potential on every node.
  for (Eigen::Index x = 0; x < n; ++x) {
    double w = -kInf;
    for (int s = 0; s < ns; ++s) w = std::max(w, -pot[s] - dist(sol.sources[s], x));
    sol.potential[x] = w;
  }
  return sol;
}

}  // namespace

bool masses_balance(const Eigen::VectorXd& delta) {
  return std::abs(delta.sum()) <= 1e-8 * delta.cwiseAbs().sum() + 1e-12;
}

TransportPlan solve_primal(const BoundaryMeasure& mu, const BoundaryMeasure& nu,
                           const GeodesicTable& geo) {
  const Eigen::Index n = mu.weights.size();
  if (nu.weights.size() != n) throw InvalidArgument("mu and nu differ in size");
  if (n > 512) throw InvalidArgument("transport solver supports at most 512 nodes");
  if (!mu.weights.allFinite() || !nu.weights.allFinite()) {
    throw InvalidArgument("transport masses must be finite");
  }
  if ((mu.weights.array() < -1e-15).any() || (nu.weights.array() < -1e-15).any()) {
    throw InvalidArgument("transport masses must be nonnegative");
  }
  check_table(geo, n);
  const Eigen::VectorXd delta = mu.weights - nu.weights;
  if (!masses_balance(delta)) throw UnbalancedMasses(delta.sum());

  const FlowSolution sol = route(delta, geo.dist);
  TransportPlan plan;
  plan.theta = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    plan.theta(i, i) = std::max(0.0, std::min(mu.weights[i], nu.weights[i]));
  }
  for (std::size_t s = 0; s < sol.sources.size(); ++s) {
    for (std::size_t k = 0; k < sol.sinks.size(); ++k) {
      plan.theta(sol.sources[s], sol.sinks[k]) +=
          sol.flow(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k));
    }
  }
  plan.cost = sol.cost;
  const double dual = sol.potential.dot(delta);
  const double gap = std::abs(plan.cost - dual);
  const double required = 1e-6 * (1.0 + plan.cost);
  if (gap > required) throw InfeasibleTolerance(gap, required);
  return plan;
}

DualSolution solve_dual(const BoundaryMeasure& delta, const GeodesicTable& geo) {
  const Eigen::Index n = delta.weights.size();
  if (n > 512) throw InvalidArgument("transport solver supports at most 512 nodes");
  if (!delta.weights.allFinite()) throw InvalidArgument("transport masses must be finite");
  check_table(geo, n);
  if (!masses_balance(delta.weights)) throw UnbalancedMasses(delta.weights.sum());

  const FlowSolution sol = route(delta.weights, geo.dist);
  DualSolution out;
  out.potential.values = sol.potential;
  if (n > 0) out.potential.values.array() -= sol.potential.minCoeff();
  out.value = out.potential.values.dot(delta.weights);
  const double gap = std::abs(sol.cost - out.value);
  const double required = 1e-6 * (1.0 + sol.cost);
  if (gap > required) throw InfeasibleTolerance(gap, required);
  return out;
}

DualityReport verify_potential(const Trajectory& traj, const SourceTerm& f,
                               const GeodesicTable& geo, const Eigen::VectorXd& sigma,
                               std::size_t t_index) {
  traj.validate();
  if (t_index == 0 || t_index + 1 >= traj.size()) {
    throw InvalidArgument("t_index must be interior to the time grid");
  }
  const BoundaryField& u = traj.states[t_index];
  if (u.size() != sigma.size()) throw InvalidArgument("trajectory does not match sigma");
  const double dt = traj.times[t_index + 1] - traj.times[t_index - 1];
  const Eigen::VectorXd ut = (traj.states[t_index + 1].values - traj.states[t_index - 1].values) / dt;

  DualityReport r;
  r.time = traj.times[t_index];
  const Eigen::VectorXd delta =
      sigma.cwiseProduct(f(r.time).values - ut);
  r.imbalance = delta.sum();
  r.balanced = masses_balance(delta);
  r.feasibility_violation = std::max(0.0, max_violation(u.values, geo));
  r.value_at_u = u.values.dot(delta);
  r.opposite_value_at_u = -r.value_at_u;
  if (!r.balanced) {
    r.value_opt = r.opposite_value_opt = std::numeric_limits<double>::quiet_NaN();
    r.relative_gap = r.opposite_relative_gap = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const DualSolution best = solve_dual({delta}, geo);
  const DualSolution best_opp = solve_dual({-delta}, geo);
  r.value_opt = best.value;
  r.potential = best.potential;
  r.relative_gap = (r.value_opt - r.value_at_u) / (1.0 + std::abs(r.value_opt));
  r.opposite_value_opt = best_opp.value;
  r.opposite_relative_gap =
      (r.opposite_value_opt - r.opposite_value_at_u) / (1.0 + std::abs(r.opposite_value_opt));
  return r;
}

}  // namespace plimit
