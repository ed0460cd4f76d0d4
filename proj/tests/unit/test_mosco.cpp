#include <doctest.h>

#include <cmath>

#include "plimit/error.hpp"
#include "plimit/mosco.hpp"

using namespace plimit;

TEST_CASE("resolvents approach the projection as p grows") {
  const auto m = build_interval_mesh(4);
  const auto geo = boundary_pairwise_distances(m);
  const auto r = resolvent_convergence_test(BoundaryField{Eigen::Vector2d(0, 2)}, {1.0}, {4, 16, 64}, m, geo,
                                            PEnergyConfig{});
  CHECK(r.failures.empty());
  CHECK(r.projection[0] == doctest::Approx(0.5));
  CHECK(r.projection[1] == doctest::Approx(1.5));
  CHECK(r.resolvent_errors(0, 0) == doctest::Approx(0.11658610545493849).epsilon(1e-6));
  CHECK(r.resolvent_errors(0, 1) == doctest::Approx(0.030055531696147407).epsilon(1e-6));
  CHECK(r.resolvent_errors(0, 2) == doctest::Approx(0.007618213627898803).epsilon(1e-5));
  CHECK(r.last_column_minimal());
}

TEST_CASE("data already at the projection give vanishing errors") {
  const auto m = build_interval_mesh(4);
  const auto geo = boundary_pairwise_distances(m);
  const auto r = resolvent_convergence_test(BoundaryField{Eigen::Vector2d(0, 3)}, {1.0}, {4, 16}, m, geo,
                                            PEnergyConfig{});
  CHECK(r.resolvent_errors.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("limsup energies of a Lipschitz trace stay below the bound") {
  const auto m = build_polygon_mesh(unit_square(), 0.2);
  const auto geo = boundary_pairwise_distances(m);
  const auto B = static_cast<Eigen::Index>(m.boundary_count());
  BoundaryField u{Eigen::VectorXd(B)};
  for (Eigen::Index i = 0; i < B; ++i) u[i] = 0.5 * m.nodes()[m.boundary_nodes()[i]].x();
  const auto rows = limsup_condition_check(u, {4, 8}, m, geo, PEnergyConfig{}, grid_metric_excess(m, geo));
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.within);
    CHECK(row.bound == doctest::Approx(m.volume() / row.p));
  }
}

TEST_CASE("ladders and inputs are validated") {
  const auto m = build_interval_mesh(4);
  const auto geo = boundary_pairwise_distances(m);
  const BoundaryField g{Eigen::Vector2d(0, 2)};
  CHECK_THROWS_AS(resolvent_convergence_test(g, {1.0}, {}, m, geo, PEnergyConfig{}), InvalidArgument);
  CHECK_THROWS_AS(resolvent_convergence_test(g, {1.0}, {8, 4}, m, geo, PEnergyConfig{}), InvalidArgument);
  CHECK_THROWS_AS(resolvent_convergence_test(g, {1.0}, {1.5}, m, geo, PEnergyConfig{}), InvalidArgument);
  CHECK_THROWS_AS(resolvent_convergence_test(g, {0.0}, {4}, m, geo, PEnergyConfig{}), InvalidArgument);
  CHECK_THROWS_AS(limsup_condition_check(BoundaryField{Eigen::Vector2d(0, 3)}, {4}, m, geo, PEnergyConfig{}, 0.0),
                  InvalidArgument);
  CHECK(grid_metric_excess(m, geo) == 0.0);
}
