#include "plimit/limitdyn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "plimit/error.hpp"

namespace plimit {

LipschitzConstraintSet make_constraint_set(GeodesicTable geo) {
  const double maxd = geo.dist.size() > 0 ? geo.dist.maxCoeff() : 0.0;
  return {std::move(geo), 1e-8 * std::max(maxd, 1e-300)};
}

double max_violation(const Eigen::VectorXd& v, const GeodesicTable& geo) {
  double worst = 0.0;
  const Eigen::Index n = v.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      worst = std::max(worst, std::abs(v[i] - v[j]) - geo.dist(i, j));
    }
  }
  return worst;
}

LipschitzProjector::LipschitzProjector(LipschitzConstraintSet set, Eigen::VectorXd sigma,
                                       ProjectionOptions options)
    : set_(std::move(set)), sigma_(std::move(sigma)), options_(options) {
  const auto n = static_cast<Eigen::Index>(set_.geodesic.size());
  if (sigma_.size() != n) throw InvalidArgument("sigma size does not match the geodesic table");
  if ((sigma_.array() <= 0.0).any()) throw InvalidArgument("sigma must be positive");
  if (set_.tolerance < 0.0) throw InvalidArgument("feasibility tolerance must be >= 0");
  inv_sigma_ = sigma_.cwiseInverse();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      pairs_.push_back({i, j, set_.geodesic.dist(i, j), inv_sigma_[i] + inv_sigma_[j]});
    }
  }
  multipliers_.assign(pairs_.size(), 0.0);
}

void LipschitzProjector::reset() { std::fill(multipliers_.begin(), multipliers_.end(), 0.0); }

// Primal active-set method whose working sets are forests of tight pair
// constraints. On a forest the equality-constrained minimizer and its
// multipliers have closed forms (one free constant per tree, fixed by the
// sigma-weighted mean). Starts from a feasible shrink of x toward its
// weighted mean. On success x is the exact projection (KKT verified) and
// the multipliers are rewritten to match it.
bool LipschitzProjector::finish_active_set(const Eigen::VectorXd& g, Eigen::VectorXd& x) {
  const auto n = static_cast<int>(x.size());
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  const double mean = sigma_.dot(x) / sigma_.sum();
  double shrink = 1.0;
  for (const Pair& pr : pairs_) {
    const double diff = std::abs(x[pr.i] - x[pr.j]);
    if (diff > pr.dist) shrink = std::min(shrink, pr.dist / diff);
  }
  Eigen::VectorXd cur = mean + shrink * (x.array() - mean);

  struct Tight {
    int pair;
    double sign;  // sign * (x_i - x_j) <= dist
  };
  std::vector<Tight> work;
  std::vector<int> in_work(pairs_.size(), 0);

  // Equality-constrained minimizer on the current forest, with per-edge
  // multipliers (lambda >= 0 at a KKT point).
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, work index)
  std::vector<int> comp(n), order, parent_edge(n), parent(n);
  std::vector<double> lambda;
  auto solve = [&](Eigen::VectorXd& v) {
    for (auto& a : adj) a.clear();
    for (std::size_t w = 0; w < work.size(); ++w) {
      const Pair& pr = pairs_[work[w].pair];
      adj[pr.i].push_back({pr.j, static_cast<int>(w)});
      adj[pr.j].push_back({pr.i, static_cast<int>(w)});
    }
    std::fill(comp.begin(), comp.end(), -1);
    order.clear();
    lambda.assign(work.size(), 0.0);
    for (int root = 0; root < n; ++root) {
      if (comp[root] >= 0) continue;
      const std::size_t first = order.size();
      comp[root] = root;
      parent[root] = -1;
      parent_edge[root] = -1;
      v[root] = 0.0;
      order.push_back(root);
      for (std::size_t k = first; k < order.size(); ++k) {
        const int a = order[k];
        for (auto [b, w] : adj[a]) {
          if (comp[b] >= 0) continue;
          const Pair& pr = pairs_[work[w].pair];
          // x_i - x_j = sign * dist
          const double off = work[w].sign * pr.dist;
          v[b] = pr.i == a ? v[a] - off : v[a] + off;
          comp[b] = root;
          parent[b] = a;
          parent_edge[b] = w;
          order.push_back(b);
        }
      }
      double num = 0.0, den = 0.0;
      for (std::size_t k = first; k < order.size(); ++k) {
        num += sigma_[order[k]] * (g[order[k]] - v[order[k]]);
        den += sigma_[order[k]];
      }
      for (std::size_t k = first; k < order.size(); ++k) v[order[k]] += num / den;
    }
    // Subtree residual sums give the multipliers, leaves first.
    std::vector<double> acc(n);
    for (int m = 0; m < n; ++m) acc[m] = sigma_[m] * (v[m] - g[m]);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int b = *it;
      if (parent[b] < 0) continue;
      const int w = parent_edge[b];
      const Pair& pr = pairs_[work[w].pair];
      // Summing the stationarity rows over the subtree of b leaves only
      // this edge: acc + lambda * sign * ([i in S] - [j in S]) = 0.
      const double side = pr.i == b ? 1.0 : -1.0;
      lambda[w] = -acc[b] / (work[w].sign * side);
      acc[parent[b]] += acc[b];
    }
  };

  const double tiny = 1e-13 * scale;
  Eigen::VectorXd target(n);
  const int max_iter = 4 * static_cast<int>(pairs_.size()) + 100;
  for (int it = 0; it < max_iter; ++it) {
    solve(target);
    const Eigen::VectorXd step = target - cur;
    if (step.lpNorm<Eigen::Infinity>() <= tiny) {
      std::size_t worst = work.size();
      for (std::size_t w = 0; w < work.size(); ++w) {
        if (lambda[w] < -tiny && (worst == work.size() || lambda[w] < lambda[worst])) worst = w;
      }
      if (worst == work.size()) {
        if (max_violation(target, set_.geodesic) > set_.tolerance) return false;
        x = target;
        std::fill(multipliers_.begin(), multipliers_.end(), 0.0);
        for (std::size_t w = 0; w < work.size(); ++w) {
          multipliers_[work[w].pair] = lambda[w] * work[w].sign;
        }
        return true;
      }
      in_work[work[worst].pair] = 0;
      work.erase(work.begin() + static_cast<std::ptrdiff_t>(worst));
      continue;
    }
    double alpha = 1.0;
    int block = -1;
    double block_sign = 0.0;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      if (in_work[k]) continue;
      const Pair& pr = pairs_[k];
      const double dp = step[pr.i] - step[pr.j];
      if (dp == 0.0) continue;
      const double sgn = dp > 0.0 ? 1.0 : -1.0;
      const double slack = std::max(0.0, pr.dist - sgn * (cur[pr.i] - cur[pr.j]));
      const double a = slack / std::abs(dp);
      if (a < alpha) {
        alpha = a;
        block = static_cast<int>(k);
        block_sign = sgn;
      }
    }
    cur += alpha * step;
    if (block >= 0) {
      work.push_back({block, block_sign});
      in_work[block] = 1;
    }
  }
  return false;
}

ProjectionResult LipschitzProjector::project(const BoundaryField& g) {
  if (g.size() != sigma_.size()) throw InvalidArgument("field size does not match the constraint set");
  if (!g.values.allFinite()) throw InvalidArgument("field has non-finite values");

  Eigen::VectorXd x = g.values;
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const double y = multipliers_[k];
    if (y == 0.0) continue;
    x[pairs_[k].i] -= y * inv_sigma_[pairs_[k].i];
    x[pairs_[k].j] += y * inv_sigma_[pairs_[k].j];
  }

  const double stop = options_.change_tol * std::max(1.0, g.values.cwiseAbs().maxCoeff());
  const double gap_stop =
      options_.gap_tol * std::max(1.0, (sigma_.array() * g.values.array().square()).sum());
  auto slackness_gap = [&] {
    double gap = 0.0;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const Pair& pr = pairs_[k];
      const double y = multipliers_[k];
      gap += pr.dist * std::abs(y) - y * (x[pr.i] - x[pr.j]);
    }
    return gap;
  };
  int cycle = 0;
  double violation = 0.0;
  for (; cycle < options_.max_cycles; ++cycle) {
    // Largest single-update displacement. Comparing x across a whole cycle
    // is not enough: x can return to a point while multipliers still move.
    double change = 0.0;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const Pair& pr = pairs_[k];
      double& y = multipliers_[k];
      const double r = x[pr.i] - x[pr.j] + y * pr.weight;
      const double clamped = std::clamp(r, -pr.dist, pr.dist);
      const double y_new = (r - clamped) / pr.weight;
      const double dy = y_new - y;
      if (dy != 0.0) {
        x[pr.i] -= dy * inv_sigma_[pr.i];
        x[pr.j] += dy * inv_sigma_[pr.j];
        y = y_new;
        change = std::max(change, std::abs(dy) * std::max(inv_sigma_[pr.i], inv_sigma_[pr.j]));
      }
    }
    if (change <= stop) {
      violation = max_violation(x, set_.geodesic);
      const double gap = slackness_gap();
      if (violation <= set_.tolerance && gap <= gap_stop) {
        return {BoundaryField{std::move(x)}, cycle + 1, violation, gap};
      }
    }
    if (change <= stop || (cycle + 1) % options_.finish_every == 0) {
      Eigen::VectorXd exact = x;
      if (finish_active_set(g.values, exact)) {
        x = std::move(exact);
        const double viol = max_violation(x, set_.geodesic);
        const double gap = slackness_gap();
        return {BoundaryField{std::move(x)}, cycle + 1, viol, gap};
      }
    }
  }
  violation = max_violation(x, set_.geodesic);
  throw MaxIterations(violation, cycle);
}

BoundaryField project_Ainf(const BoundaryField& g, const LipschitzConstraintSet& set,
                           const Eigen::VectorXd& sigma) {
  LipschitzProjector projector(set, sigma);
  return projector.project(g).point;
}

BoundaryField example1_exact(double t) { return example2_exact(0.0, 0.0, t); }

double example2_switch_time(double u0_at_0, double u0_at_1) {
  return u0_at_0 - u0_at_1 + 1.0;
}

BoundaryField example2_exact(double u0_at_0, double u0_at_1, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("time must be nonnegative");
  if (!(std::abs(u0_at_1 - u0_at_0) <= 1.0)) {
    throw InvalidArgument("initial data admit no 1-Lipschitz extension on (0,1)");
  }
  const double t0 = example2_switch_time(u0_at_0, u0_at_1);
  Eigen::VectorXd v(2);
  if (t <= t0) {
    v << u0_at_0, u0_at_1 + t;
  } else {
    const double half = 0.5 * (t - t0);
    v << u0_at_0 + half, u0_at_1 + half + t0;
  }
  return {v};
}

double SandpileState::level_measure(double a) const {
  double m = 0.0;
  for (Eigen::Index i = 0; i < dist_to_gamma.size(); ++i) {
    if (dist_to_gamma[i] < a) m += sigma[i];
  }
  return m;
}

double SandpileState::time_of_level(double a) const {
  double mass = 0.0;
  for (Eigen::Index i = 0; i < dist_to_gamma.size(); ++i) {
    mass += sigma[i] * std::max(0.0, a - dist_to_gamma[i]);
  }
  return mass / gamma_mass;
}

double SandpileState::level_at_time(double t) const {
  if (!(t >= 0.0)) throw InvalidArgument("time must be nonnegative");
  const double t_sat = saturation_time();
  if (t >= t_sat) return max_distance() + (t - t_sat) * gamma_mass / total_measure;
  // m >= |Gamma| so t(a) >= a and a(t) <= t.
  double lo = 0.0, hi = std::min(t, max_distance());
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (time_of_level(mid) < t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SandpileState make_sandpile_state(const DomainMesh& mesh, std::span<const int> gamma_positions) {
  if (gamma_positions.empty()) throw InvalidArgument("sandpile source set is empty");
  SandpileState s;
  s.sigma = mesh.sigma();
  s.total_measure = s.sigma.sum();
  std::vector<int> nodes;
  for (int pos : gamma_positions) {
    if (pos < 0 || pos >= static_cast<int>(mesh.boundary_count())) {
      throw InvalidArgument("sandpile source position out of range");
    }
    s.gamma.push_back(pos);
    nodes.push_back(mesh.boundary_nodes()[pos]);
  }
  std::sort(s.gamma.begin(), s.gamma.end());
  s.gamma.erase(std::unique(s.gamma.begin(), s.gamma.end()), s.gamma.end());
  for (int pos : s.gamma) s.gamma_mass += s.sigma[pos];

  const Eigen::VectorXd d = geodesic_distance(mesh, nodes);
  const auto nb = static_cast<Eigen::Index>(mesh.boundary_count());
  s.dist_to_gamma.resize(nb);
  for (Eigen::Index i = 0; i < nb; ++i) s.dist_to_gamma[i] = d[mesh.boundary_nodes()[i]];
  for (int pos : s.gamma) s.dist_to_gamma[pos] = 0.0;

  s.levels.assign(s.dist_to_gamma.data(), s.dist_to_gamma.data() + nb);
  std::sort(s.levels.begin(), s.levels.end());
  s.levels.erase(std::unique(s.levels.begin(), s.levels.end()), s.levels.end());
  for (std::size_t k = 0; k < s.levels.size(); ++k) {
    // m on (levels[k], levels[k+1]] counts every node with d <= levels[k].
    s.level_mass.push_back(s.level_measure(std::nextafter(s.levels[k], 1e300)));
  }
  return s;
}

BoundaryField sandpile_exact(const SandpileState& state, double t) {
  const double a = state.level_at_time(t);
  return {(a - state.dist_to_gamma.array()).max(0.0).matrix()};
}

double uniform_phase_speed(const SandpileState& state) {
  return state.gamma_mass / state.total_measure;
}

int support_components(const DomainMesh& mesh, const BoundaryField& u, double threshold) {
  const auto n = u.size();
  if (n != static_cast<Eigen::Index>(mesh.boundary_count())) {
    throw InvalidArgument("field size does not match the mesh boundary");
  }
  int runs = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool on = u[i] > threshold;
    const Eigen::Index prev = i == 0 ? (mesh.boundary_is_cycle() ? n - 1 : -1) : i - 1;
    const bool prev_on = prev >= 0 && u[prev] > threshold;
    if (on && !prev_on) ++runs;
  }
  if (runs == 0 && n > 0 && (u.values.array() > threshold).all()) runs = 1;
  return runs;
}

}  // namespace plimit
