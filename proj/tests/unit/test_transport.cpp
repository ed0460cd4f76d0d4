#include <doctest.h>

#include <random>

#include "plimit/error.hpp"
#include "plimit/oracles.hpp"
#include "plimit/transport.hpp"

using namespace plimit;

namespace {

GeodesicTable segment() {
  GeodesicTable g;
  g.boundary_nodes = {0, 1};
  g.dist = Eigen::Matrix2d{{0, 1}, {1, 0}};
  return g;
}

}  // namespace

TEST_CASE("moving a unit mass across the interval costs one") {
  const auto plan = solve_primal({Eigen::Vector2d(1, 0)}, {Eigen::Vector2d(0, 1)}, segment());
  CHECK(plan.cost == doctest::Approx(1.0));
  CHECK(plan.theta(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("common mass stays put") {
  const auto plan = solve_primal({Eigen::Vector2d(1, 0.5)}, {Eigen::Vector2d(0.5, 1)}, segment());
  CHECK(plan.cost == doctest::Approx(0.5));
  CHECK(plan.theta(0, 0) == doctest::Approx(0.5));
  CHECK(plan.theta(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("dual optimum on the interval") {
  const auto d = solve_dual({Eigen::Vector2d(0.5, -0.5)}, segment());
  CHECK(d.value == doctest::Approx(0.5));
  CHECK(d.potential[0] - d.potential[1] == doctest::Approx(1.0));
  CHECK(d.potential.values.minCoeff() == 0.0);
}

TEST_CASE("strong duality and agreement with the spanning-tree oracle") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 4;
    std::vector<Eigen::Vector2d> x(n);
    for (auto& p : x) p = {U(rng), U(rng)};
    GeodesicTable geo;
    geo.dist.resize(n, n);
    for (int i = 0; i < n; ++i) {
      geo.boundary_nodes.push_back(i);
      for (int j = 0; j < n; ++j) geo.dist(i, j) = (x[i] - x[j]).norm();
    }
    Eigen::VectorXd mu(n), nu(n);
    for (int i = 0; i < n; ++i) {
      mu[i] = U(rng);
      nu[i] = U(rng);
    }
    nu *= mu.sum() / nu.sum();
    const auto plan = solve_primal({mu}, {nu}, geo);
    const auto dual = solve_dual({mu - nu}, geo);
    CHECK(std::abs(plan.cost - dual.value) <= 1e-9 * (1 + plan.cost));
    CHECK(std::abs(plan.cost - oracles::brute_force_transport(mu, nu, geo.dist)) <= 1e-6);
    CHECK((plan.theta.rowwise().sum() - mu).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((plan.theta.colwise().sum().transpose() - nu).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(max_violation(dual.potential.values, geo) <= 1e-12);
  }
}

TEST_CASE("transport rejects bad input") {
  CHECK_THROWS_AS(solve_primal({Eigen::Vector2d(1, 0)}, {Eigen::Vector2d(0, 2)}, segment()), UnbalancedMasses);
  CHECK_THROWS_AS(solve_primal({Eigen::Vector2d(-1, 1)}, {Eigen::Vector2d(0, 0)}, segment()), InvalidArgument);
  CHECK_THROWS_AS(solve_primal({Eigen::Vector3d(1, 0, 0)}, {Eigen::Vector3d(0, 1, 0)}, segment()), InvalidArgument);
  GeodesicTable bad;
  bad.boundary_nodes = {0, 1, 2};
  bad.dist = Eigen::Matrix3d{{0, 1, 5}, {1, 0, 1}, {5, 1, 0}};
  CHECK_THROWS_AS(solve_dual({Eigen::Vector3d(1, 0, -1)}, bad), InvalidArgument);
  CHECK_THROWS_AS(solve_dual({Eigen::Vector2d(1, 1)}, segment()), UnbalancedMasses);
}

TEST_CASE("verify_potential on the limit flow") {
  const auto m = build_interval_mesh(4);
  const auto geo = boundary_pairwise_distances(m);
  const auto f = constant_source(BoundaryField{Eigen::Vector2d(0, 1)});
  Trajectory traj;
  for (int k = 0; k <= 20; ++k) {
    traj.times.push_back(0.1 * k);
    traj.states.push_back(example1_exact(0.1 * k));
    traj.step_meta.push_back({});
  }
  const auto r = verify_potential(traj, f, geo, m.sigma(), 15);
  CHECK(r.balanced);
  CHECK(r.value_opt == doctest::Approx(0.5));
  CHECK(std::abs(r.relative_gap) <= 1e-12);
  CHECK(r.opposite_relative_gap > 0.5);
  CHECK_THROWS_AS(verify_potential(traj, f, geo, m.sigma(), 0), InvalidArgument);
  CHECK_THROWS_AS(verify_potential(traj, f, geo, m.sigma(), 20), InvalidArgument);
}
