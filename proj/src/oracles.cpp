#include "plimit/oracles.hpp"

#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace plimit::oracles {

namespace {

struct TightEdge {
  int i;
  int j;
  double offset;  // v_i - v_j
};

// Closed-form minimizer when the tight edges form a forest: each tree is
// rigid up to a constant, fixed by the sigma-weighted mean of g.
Eigen::VectorXd solve_forest(const Eigen::VectorXd& g, const Eigen::VectorXd& sigma,
                             const std::vector<TightEdge>& edges) {
  const int n = static_cast<int>(g.size());
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& e : edges) {
    adj[e.i].push_back({e.j, -e.offset});
    adj[e.j].push_back({e.i, e.offset});
  }
  Eigen::VectorXd v(n);
  std::vector<int> comp(n, -1);
  for (int root = 0; root < n; ++root) {
    if (comp[root] >= 0) continue;
    std::vector<int> members{root};
    comp[root] = root;
    v[root] = 0.0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const int a = members[k];
      for (auto [b, delta] : adj[a]) {
        if (comp[b] >= 0) continue;
        comp[b] = root;
        v[b] = v[a] + delta;
        members.push_back(b);
      }
    }
    double num = 0.0, den = 0.0;
    for (int m : members) {
      num += sigma[m] * (g[m] - v[m]);
      den += sigma[m];
    }
    for (int m : members) v[m] += num / den;
  }
  return v;
}

int find(std::vector<int>& parent, int a) {
  while (parent[a] != a) a = parent[a] = parent[parent[a]];
  return a;
}

}  // namespace

Eigen::VectorXd brute_force_projection(const Eigen::VectorXd& g, const Eigen::VectorXd& sigma,
                                       const Eigen::MatrixXd& dist) {
  const int n = static_cast<int>(g.size());
  if (n > 7) throw std::invalid_argument("brute_force_projection: too many nodes");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  }
  const double slack = 1e-9 * (1.0 + dist.maxCoeff());
  auto feasible = [&](const Eigen::VectorXd& v) {
    for (auto [i, j] : pairs) {
      if (std::abs(v[i] - v[j]) > dist(i, j) + slack) return false;
    }
    return true;
  };

  double best_obj = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best;
  std::vector<TightEdge> chosen;
  std::function<void(std::size_t, std::vector<int>)> rec = [&](std::size_t k, std::vector<int> parent) {
    if (k == pairs.size()) {
      const Eigen::VectorXd v = solve_forest(g, sigma, chosen);
      if (!feasible(v)) return;
      const double obj = (sigma.array() * (v - g).array().square()).sum();
      if (obj < best_obj) {
        best_obj = obj;
        best = v;
      }
      return;
    }
    rec(k + 1, parent);
    const auto [i, j] = pairs[k];
    const int ri = find(parent, i), rj = find(parent, j);
    if (ri == rj) return;
    parent[ri] = rj;
    for (double sign : {1.0, -1.0}) {
      chosen.push_back({i, j, sign * dist(i, j)});
      rec(k + 1, parent);
      chosen.pop_back();
    }
  };
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  rec(0, parent);
  return best;
}

double brute_force_transport(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                             const Eigen::MatrixXd& dist) {
  std::vector<int> src, dst;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu[i] > 0.0) src.push_back(static_cast<int>(i));
    if (nu[i] > 0.0) dst.push_back(static_cast<int>(i));
  }
  const int s = static_cast<int>(src.size()), k = static_cast<int>(dst.size());
  if (s == 0 || k == 0) return 0.0;
  if (s + k > 10) throw std::invalid_argument("brute_force_transport: support too large");
  const int nodes = s + k, need = nodes - 1, arcs = s * k;
  const double tol = 1e-12 * (mu.sum() + nu.sum());

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick;
  // Choose need arcs out of arcs in lexicographic order.
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(pick.size()) == need) {
      std::vector<int> parent(nodes);
      std::iota(parent.begin(), parent.end(), 0);
      std::vector<std::vector<int>> inc(nodes);
      for (int a : pick) {
        const int u = a / k, w = s + a % k;
        const int ru = find(parent, u), rw = find(parent, w);
        if (ru == rw) return;
        parent[ru] = rw;
        inc[u].push_back(a);
        inc[w].push_back(a);
      }
      // Peel leaves: a leaf's only arc carries its whole remaining mass.
      std::vector<double> rem(nodes);
      for (int a = 0; a < s; ++a) rem[a] = mu[src[a]];
      for (int b = 0; b < k; ++b) rem[s + b] = nu[dst[b]];
      std::vector<int> degree(nodes);
      for (int v = 0; v < nodes; ++v) degree[v] = static_cast<int>(inc[v].size());
      std::vector<char> used(arcs, 0);
      double cost = 0.0;
      for (int round = 0; round < need; ++round) {
        int leaf = -1;
        for (int v = 0; v < nodes && leaf < 0; ++v) {
          if (degree[v] == 1) leaf = v;
        }
        int arc = -1;
        for (int a : inc[leaf]) {
          if (!used[a]) arc = a;
        }
        const double x = rem[leaf];
        if (x < -tol) return;
        const int u = arc / k, w = s + arc % k;
        const int other = leaf == u ? w : u;
        rem[leaf] = 0.0;
        rem[other] -= x;
        used[arc] = 1;
        --degree[u];
        --degree[w];
        cost += x * dist(src[u], dst[w - s]);
      }
      best = std::min(best, cost);
      return;
    }
    for (int a = start; a <= arcs - (need - static_cast<int>(pick.size())); ++a) {
      pick.push_back(a);
      rec(a + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return best;
}

}  // namespace plimit::oracles
