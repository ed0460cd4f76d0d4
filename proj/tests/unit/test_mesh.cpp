#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "plimit/error.hpp"
#include "plimit/mesh.hpp"

using namespace plimit;

TEST_CASE("interval mesh has two unit-weight endpoints") {
  const auto m = build_interval_mesh(4);
  CHECK(m.dim() == 1);
  CHECK(m.node_count() == 5);
  CHECK(m.element_count() == 4);
  REQUIRE(m.boundary_count() == 2);
  CHECK(m.nodes()[m.boundary_nodes()[0]].x() == 0.0);
  CHECK(m.nodes()[m.boundary_nodes()[1]].x() == 1.0);
  CHECK(m.sigma().isApprox(Eigen::Vector2d(1.0, 1.0)));
  CHECK(m.volume() == doctest::Approx(1.0));
  const auto geo = boundary_pairwise_distances(m);
  CHECK(geo.dist(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("unit square measures") {
  const auto m = build_polygon_mesh(unit_square(), 0.1);
  CHECK(m.volume() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.boundary_measure() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(m.boundary_is_cycle());
  CHECK(m.max_edge_length() <= 0.1 * std::sqrt(2.0) + 1e-9);
}

TEST_CASE("inscribed 64-gon matches the polygon formulas") {
  const auto v = inscribed_polygon(64);
  const auto m = build_polygon_mesh(v, 0.2);
  CHECK(m.volume() == doctest::Approx(3.1365484905459393).epsilon(1e-10));
  CHECK(m.boundary_measure() == doctest::Approx(6.280662313909506).epsilon(1e-10));
}

TEST_CASE("adjacent square corners are one apart up to the grid excess") {
  const auto m = build_polygon_mesh(unit_square(), 0.05);
  int c00 = -1, c10 = -1;
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    const auto& x = m.nodes()[i];
    if (x.norm() < 1e-12) c00 = static_cast<int>(i);
    if ((x - Point(1, 0)).norm() < 1e-12) c10 = static_cast<int>(i);
  }
  REQUIRE(c00 >= 0);
  REQUIRE(c10 >= 0);
  const int src[] = {c00};
  const auto d = geodesic_distance(m, src);
  CHECK(d[c10] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(d[c00] == 0.0);
}

TEST_CASE("geodesic table: symmetry, triangle inequality, chord bound, ratio") {
  const auto m = build_polygon_mesh(unit_square(), 0.05);
  const auto geo = boundary_pairwise_distances(m);
  const auto n = static_cast<Eigen::Index>(geo.size());
  double worst_tri = 0.0, worst_chord = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    CHECK(geo.dist(i, i) == 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      CHECK(geo.dist(i, j) == geo.dist(j, i));
      const double chord = (m.nodes()[geo.boundary_nodes[i]] - m.nodes()[geo.boundary_nodes[j]]).norm();
      worst_chord = std::max(worst_chord, chord - geo.dist(i, j));
      for (Eigen::Index k = 0; k < n; k += 7) {
        worst_tri = std::max(worst_tri, geo.dist(i, k) - geo.dist(i, j) - geo.dist(j, k));
      }
    }
  }
  CHECK(worst_tri <= 1e-12);
  CHECK(worst_chord <= 1e-10);
  CHECK(max_chord_ratio(m, geo) <= 1.09);
}

TEST_CASE("chord ratio settles on the octile constant under refinement") {
  // Worst ratio of the edge-graph metric to the chord on the structured
  // square grid; approached from below once h is small.
  const double octile = std::sqrt(4.0 - 2.0 * std::sqrt(2.0));
  double prev_gap = 1e300;
  for (double h : {0.125, 0.0625, 0.025}) {
    const auto m = build_polygon_mesh(unit_square(), h);
    const double r = max_chord_ratio(m, boundary_pairwise_distances(m));
    CHECK(r >= 1.0);
    CHECK(r <= octile + 1e-12);
    CHECK(octile - r < prev_gap);
    prev_gap = octile - r;
  }
}

TEST_CASE("mesh construction rejects bad input") {
  CHECK_THROWS_AS(build_interval_mesh(0), InvalidArgument);
  CHECK_THROWS_AS(build_polygon_mesh(unit_square(), 0.0), InvalidArgument);
  CHECK_THROWS_AS(build_polygon_mesh(unit_square(), 5.0), InvalidArgument);
  CHECK_THROWS_AS(inscribed_polygon(2), InvalidArgument);
  const std::vector<Point> two{Point(0, 0), Point(1, 0)};
  CHECK_THROWS_AS(build_polygon_mesh(two, 0.1), InvalidArgument);
  CHECK_THROWS_AS(DomainMesh::from_parts(1, {Point(0, 0), Point(0, 0)}, {{0, 1, 0}}, {0, 1}, {1.0, 1.0}),
                  MeshError);
  CHECK_THROWS_AS(DomainMesh::from_parts(1, {Point(0, 0), Point(1, 0)}, {{0, 1, 0}}, {0, 1}, {1.0, -1.0}),
                  MeshError);
  CHECK_THROWS_AS(DomainMesh::from_parts(3, {Point(0, 0)}, {{0, 0, 0}}, {0}, {1.0}), MeshError);
  const auto m = build_interval_mesh(2);
  const int bad[] = {7};
  CHECK_THROWS_AS(geodesic_distance(m, bad), InvalidArgument);
}

TEST_CASE("meshes are deterministic") {
  const auto a = build_polygon_mesh(inscribed_polygon(12), 0.15);
  const auto b = build_polygon_mesh(inscribed_polygon(12), 0.15);
  REQUIRE(a.node_count() == b.node_count());
  CHECK(a.elements() == b.elements());
  CHECK(a.boundary_nodes() == b.boundary_nodes());
  for (std::size_t i = 0; i < a.node_count(); ++i) CHECK(a.nodes()[i] == b.nodes()[i]);
}
