#include <doctest.h>

#include <cmath>
#include <random>

#include "plimit/error.hpp"
#include "plimit/limitdyn.hpp"
#include "plimit/oracles.hpp"

using namespace plimit;

namespace {

GeodesicTable all_ones(int n) {
  GeodesicTable g;
  for (int i = 0; i < n; ++i) g.boundary_nodes.push_back(i);
  g.dist = Eigen::MatrixXd::Ones(n, n);
  g.dist.diagonal().setZero();
  return g;
}

GeodesicTable random_euclidean(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Eigen::Vector2d> x(n);
  for (auto& p : x) p = {U(rng), U(rng)};
  GeodesicTable g;
  g.dist.resize(n, n);
  for (int i = 0; i < n; ++i) {
    g.boundary_nodes.push_back(i);
    for (int j = 0; j < n; ++j) g.dist(i, j) = (x[i] - x[j]).norm();
  }
  return g;
}

}  // namespace

TEST_CASE("three-point projection") {
  const auto set = make_constraint_set(all_ones(3));
  const auto v = project_Ainf(BoundaryField{Eigen::Vector3d(0, 0, 3)}, set, Eigen::Vector3d::Ones());
  CHECK(v[0] == doctest::Approx(2.0 / 3).epsilon(1e-9));
  CHECK(v[1] == doctest::Approx(2.0 / 3).epsilon(1e-9));
  CHECK(v[2] == doctest::Approx(5.0 / 3).epsilon(1e-9));
}

TEST_CASE("two-point projection splits the excess by inverse weights") {
  const auto set = make_constraint_set(all_ones(2));
  const auto v = project_Ainf(BoundaryField{Eigen::Vector2d(0, 3)}, set, Eigen::Vector2d(1.0, 3.0));
  // Mean preserved: v0 + 3 v1 = 9 and v1 - v0 = 1.
  CHECK(v[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("projection invariants on random instances") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + trial % 6;
    auto geo = random_euclidean(n, rng);
    Eigen::VectorXd sigma(n), g(n), g2(n);
    for (int i = 0; i < n; ++i) {
      sigma[i] = 0.5 + std::abs(N(rng));
      g[i] = N(rng);
      g2[i] = N(rng);
    }
    const auto set = make_constraint_set(geo);
    const auto v = project_Ainf({g}, set, sigma);
    const double maxd = geo.dist.maxCoeff();
    CHECK(max_violation(v.values, geo) <= 1e-8 * maxd);
    CHECK(std::abs(sigma.dot(v.values - g)) <= 1e-8 * std::max(1.0, g.norm()));
    const auto vv = project_Ainf(v, set, sigma);
    CHECK((vv.values - v.values).cwiseAbs().maxCoeff() <= 1e-8);
    const auto v2 = project_Ainf({g2}, set, sigma);
    CHECK(weighted_l2(v.values - v2.values, sigma) <= weighted_l2(g - g2, sigma) * (1 + 1e-9));
    if (n <= 6) {
      const Eigen::VectorXd ref = oracles::brute_force_projection(g, sigma, geo.dist);
      CHECK((ref - v.values).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }
}

TEST_CASE("feasible data are fixed points") {
  const auto set = make_constraint_set(all_ones(4));
  const Eigen::Vector4d g(0.1, 0.5, 0.9, 0.3);
  const auto v = project_Ainf({g}, set, Eigen::Vector4d::Ones());
  CHECK((v.values - g).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("projector warm starts reproduce cold results") {
  std::mt19937_64 rng(9);
  auto geo = random_euclidean(7, rng);
  LipschitzProjector warm(make_constraint_set(geo), Eigen::VectorXd::Ones(7));
  std::normal_distribution<double> N(0.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    Eigen::VectorXd g(7);
    for (int i = 0; i < 7; ++i) g[i] = N(rng);
    const auto a = warm.project({g});
    const auto b = project_Ainf({g}, make_constraint_set(geo), Eigen::VectorXd::Ones(7));
    CHECK((a.point.values - b.values).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("projector rejects bad input") {
  auto set = make_constraint_set(all_ones(3));
  CHECK_THROWS_AS(LipschitzProjector(set, Eigen::Vector2d::Ones()), InvalidArgument);
  CHECK_THROWS_AS(LipschitzProjector(set, Eigen::Vector3d(1, 0, 1)), InvalidArgument);
  LipschitzProjector proj(set, Eigen::Vector3d::Ones());
  CHECK_THROWS_AS(proj.project({Eigen::Vector2d(0, 1)}), InvalidArgument);
  CHECK_THROWS_AS(proj.project({Eigen::Vector3d(0, NAN, 1)}), InvalidArgument);
}

TEST_CASE("interval closed forms") {
  // Unit source at x = 1.
  const auto a = example1_exact(0.5);
  CHECK(a[0] == doctest::Approx(0.0));
  CHECK(a[1] == doctest::Approx(0.5));
  const auto b = example1_exact(2.0);
  CHECK(b[0] == doctest::Approx(0.5));
  CHECK(b[1] == doctest::Approx(1.5));
  CHECK(example2_switch_time(0.3, 0.0) == doctest::Approx(1.3));
  const auto c = example2_exact(0.3, 0.0, 2.3);
  CHECK(c[1] - c[0] == doctest::Approx(1.0));
  CHECK(c[0] + c[1] == doctest::Approx(0.3 + 2.3));
  CHECK_THROWS_AS(example1_exact(-1.0), InvalidArgument);
  CHECK_THROWS_AS(example2_exact(2.0, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("sandpile on the square: mass identity and monotonicity") {
  const auto m = build_polygon_mesh(unit_square(), 0.1);
  std::vector<int> gamma;
  for (std::size_t b = 0; b < m.boundary_count(); ++b) {
    const auto& x = m.nodes()[m.boundary_nodes()[b]];
    if (std::abs(x.y()) < 1e-12 && x.x() + 0.5 * m.boundary_weights()[b] < 1.0 - 1e-12) {
      gamma.push_back(static_cast<int>(b));
    }
  }
  const auto st = make_sandpile_state(m, gamma);
  CHECK(st.gamma_mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(uniform_phase_speed(st) == doctest::Approx(0.25).epsilon(1e-12));
  BoundaryField prev = sandpile_exact(st, 0.0);
  CHECK(prev.values.cwiseAbs().maxCoeff() == 0.0);
  for (double t = 0.1; t <= 3.0; t += 0.1) {
    const auto u = sandpile_exact(st, t);
    CHECK(st.sigma.dot(u.values) == doctest::Approx(t * st.gamma_mass).epsilon(1e-9));
    CHECK(((u.values - prev.values).array() >= -1e-12).all());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (prev[i] > 0.0) CHECK(u[i] > 0.0);
    }
    prev = u;
  }
}

TEST_CASE("sandpile support can disconnect on a strictly convex domain") {
  const auto m = build_polygon_mesh(inscribed_polygon(64, 2.0, 0.3), 0.05);
  std::vector<int> gamma;
  for (std::size_t b = 0; b < m.boundary_count(); ++b) {
    const auto& x = m.nodes()[m.boundary_nodes()[b]];
    if (x.y() > 0.29 && std::abs(x.x()) < 0.15) gamma.push_back(static_cast<int>(b));
  }
  REQUIRE(!gamma.empty());
  const auto st = make_sandpile_state(m, gamma);
  int most = 0;
  for (double t = 0.0; t <= st.saturation_time(); t += st.saturation_time() / 200) {
    most = std::max(most, support_components(m, sandpile_exact(st, t)));
  }
  CHECK(most >= 2);
}

TEST_CASE("sandpile rejects bad source sets") {
  const auto m = build_polygon_mesh(unit_square(), 0.25);
  CHECK_THROWS_AS(make_sandpile_state(m, std::vector<int>{}), InvalidArgument);
  CHECK_THROWS_AS(make_sandpile_state(m, std::vector<int>{9999}), InvalidArgument);
}
