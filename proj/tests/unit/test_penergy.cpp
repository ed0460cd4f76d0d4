#include <doctest.h>

#include <cmath>
#include <random>

#include "plimit/error.hpp"
#include "plimit/penergy.hpp"

using namespace plimit;

namespace {

PEnergyConfig config(double p) {
  PEnergyConfig c;
  c.p = p;
  return c;
}

}  // namespace

TEST_CASE("energy of a linear function on the interval") {
  const auto m = build_interval_mesh(4);
  InteriorField v{Eigen::VectorXd(5)};
  for (int i = 0; i < 5; ++i) v[i] = 3.0 * m.nodes()[i].x();
  auto c = config(4.0);
  c.eps_reg = 0.0;
  CHECK(discrete_energy(m, v, c) == doctest::Approx(81.0 / 4.0).epsilon(1e-14));
}

TEST_CASE("1D extension is the linear interpolant") {
  const auto m = build_interval_mesh(8);
  const BoundaryField u{Eigen::Vector2d(1.0, -2.0)};
  const auto ext = p_extension(m, u, config(16.0));
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    CHECK(ext.field[static_cast<Eigen::Index>(i)] ==
          doctest::Approx(1.0 - 3.0 * m.nodes()[i].x()).epsilon(1e-8));
  }
  CHECK(energy_Ep(m, u, config(16.0)) == doctest::Approx(std::pow(3.0, 16) / 16).epsilon(1e-8));
}

TEST_CASE("two-point prox solves s^(p-1) = (2 - s) / 2") {
  // Reference roots computed independently by bracketing.
  const auto m = build_interval_mesh(4);
  const BoundaryField g{Eigen::Vector2d(0.0, 2.0)};
  struct Row {
    double p, v0, v1;
  };
  for (const Row& r : {Row{4, 0.5824388257593169, 1.417561174240683},
                       Row{16, 0.521252470274513, 1.4787475297254868},
                       Row{64, 0.5053868905168151, 1.494613109483185}}) {
    const auto out = prox_Ep(m, g, 1.0, config(r.p));
    CHECK(out.trace[0] == doctest::Approx(r.v0).epsilon(1e-6));
    CHECK(out.trace[1] == doctest::Approx(r.v1).epsilon(1e-6));
  }
}

TEST_CASE("prox of (0, 3) with lambda 1 is (1, 2) for every p") {
  const auto m = build_interval_mesh(4);
  const BoundaryField g{Eigen::Vector2d(0.0, 3.0)};
  for (double p : {2.0, 4.0, 16.0, 64.0}) {
    const auto out = prox_Ep(m, g, 1.0, config(p));
    CHECK(out.trace[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(out.trace[1] == doctest::Approx(2.0).epsilon(1e-8));
  }
}

TEST_CASE("prox: translation equivariance, mean preservation, nonexpansiveness") {
  const auto m = build_polygon_mesh(unit_square(), 0.25);
  const auto sigma = m.sigma();
  const auto B = static_cast<Eigen::Index>(m.boundary_count());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto cfg = config(4.0);
  for (int trial = 0; trial < 5; ++trial) {
    BoundaryField g1{Eigen::VectorXd(B)}, g2{Eigen::VectorXd(B)};
    for (Eigen::Index i = 0; i < B; ++i) {
      g1[i] = U(rng);
      g2[i] = U(rng);
    }
    const auto p1 = prox_Ep(m, g1, 0.5, cfg);
    const auto p2 = prox_Ep(m, g2, 0.5, cfg);
    const auto shifted = prox_Ep(m, BoundaryField{g1.values.array() + 0.7}, 0.5, cfg);
    CHECK((shifted.trace.values.array() - 0.7 - p1.trace.values.array()).abs().maxCoeff() <= 1e-7);
    CHECK(std::abs(sigma.dot(p1.trace.values - g1.values)) <= 1e-8);
    CHECK(weighted_l2(p1.trace.values - p2.trace.values, sigma) <=
          weighted_l2(g1.values - g2.values, sigma) * (1 + 1e-9));
  }
}

TEST_CASE("analytic gradient agrees with finite differences") {
  const auto m = build_polygon_mesh(unit_square(), 0.25);
  InteriorField v{Eigen::VectorXd(static_cast<Eigen::Index>(m.node_count()))};
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    v[static_cast<Eigen::Index>(i)] = std::sin(3 * m.nodes()[i].x()) + m.nodes()[i].y() * m.nodes()[i].y();
  }
  for (double p : {2.0, 4.0, 8.0}) CHECK(gradient_check(m, v, config(p)) <= 1e-4);
}

TEST_CASE("regularization changes the energy by at most the first-order bound") {
  const auto m = build_polygon_mesh(unit_square(), 0.25);
  InteriorField v{Eigen::VectorXd(static_cast<Eigen::Index>(m.node_count()))};
  for (std::size_t i = 0; i < m.node_count(); ++i) v[static_cast<Eigen::Index>(i)] = m.nodes()[i].x() * m.nodes()[i].y();
  auto c = config(4.0);
  c.eps_reg = 1e-3;
  auto c0 = c;
  c0.eps_reg = 0.0;
  const double diff = std::abs(discrete_energy(m, v, c) - discrete_energy(m, v, c0));
  // |grad v| <= sqrt(2) on the unit square for v = xy.
  const double bound = m.volume() * (c.p / 2) * 1e-6 * std::pow(2.0 + 1e-6, c.p / 2 - 1);
  CHECK(diff <= bound);
}

TEST_CASE("configuration and argument validation") {
  auto c = config(1.5);
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = config(8.0);
  c.continuation = {4.0, 2.0, 8.0};
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.continuation = {2.0, 4.0};
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = config(8.0);
  c.eps_reg = -1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  const auto m = build_interval_mesh(2);
  CHECK_THROWS_AS(prox_Ep(m, BoundaryField{Eigen::Vector2d(0, 1)}, 0.0, config(4)), InvalidArgument);
  CHECK_THROWS_AS(prox_Ep(m, BoundaryField{Eigen::Vector3d(0, 1, 2)}, 1.0, config(4)), InvalidArgument);
  CHECK_THROWS_AS(p_extension(m, BoundaryField{Eigen::Vector2d(0, NAN)}, config(4)), InvalidArgument);
  const auto ladder = config(20.0).ladder();
  REQUIRE(!ladder.empty());
  CHECK(ladder.back() == 20.0);
  for (std::size_t k = 1; k < ladder.size(); ++k) CHECK(ladder[k] > ladder[k - 1]);
}
