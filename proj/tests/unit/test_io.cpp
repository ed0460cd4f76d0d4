#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "plimit/error.hpp"
#include "plimit/io.hpp"

using namespace plimit;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "plimit_unit_io";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("mesh and geodesic JSON round-trip") {
  for (const auto& m : {build_interval_mesh(3), build_polygon_mesh(unit_square(), 0.25)}) {
    const auto back = io::mesh_from_json(io::mesh_to_json(m));
    CHECK(back.dim() == m.dim());
    CHECK(back.elements() == m.elements());
    CHECK(back.boundary_nodes() == m.boundary_nodes());
    CHECK(back.boundary_weights() == m.boundary_weights());
    CHECK(io::dump_json(io::mesh_to_json(back)) == io::dump_json(io::mesh_to_json(m)));
    const auto geo = boundary_pairwise_distances(m);
    const auto g2 = io::geo_from_json(io::geo_to_json(geo));
    CHECK(g2.boundary_nodes == geo.boundary_nodes);
    CHECK(g2.dist == geo.dist);
  }
}

TEST_CASE("geodesic JSON validation") {
  using io::json;
  CHECK_THROWS_AS(io::geo_from_json(json{{"boundary", {0, 1}}, {"dist", {{0, 1}, {2, 0}}}}), InvalidArgument);
  CHECK_THROWS_AS(io::geo_from_json(json{{"boundary", {0, 1}}, {"dist", {{1, 1}, {1, 0}}}}), InvalidArgument);
  CHECK_THROWS_AS(io::geo_from_json(json{{"boundary", {0, 1}}, {"dist", {{0, -1}, {-1, 0}}}}), InvalidArgument);
  CHECK_THROWS_AS(io::geo_from_json(json{{"dist", 3}}), InvalidArgument);
}

TEST_CASE("shortest round-trip number formatting") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(1.0) == "1");
  CHECK(std::stod(io::format_double(1.0 / 3)) == 1.0 / 3);
}

TEST_CASE("boundary CSV round-trip in any row order") {
  const std::vector<int> bn{4, 7, 2};
  const BoundaryField u{Eigen::Vector3d(0.25, -1.0 / 3, 9.5)};
  const auto p = scratch("b.csv");
  io::write_boundary_csv(p, u, bn);
  CHECK(io::read_boundary_csv(p, bn).values == u.values);
  write_text(p, "node_index,value\n2,9.5\n4,0.25\n7,1\n");
  CHECK(io::read_boundary_csv(p, bn).values == Eigen::Vector3d(0.25, 1, 9.5));
}

TEST_CASE("boundary CSV errors") {
  const std::vector<int> bn{0, 1};
  const auto p = scratch("bad.csv");
  write_text(p, "node_index,value\n0,1\n");
  CHECK_THROWS_AS(io::read_boundary_csv(p, bn), InvalidArgument);
  write_text(p, "node_index,value\n0,1\n0,2\n");
  CHECK_THROWS_AS(io::read_boundary_csv(p, bn), InvalidArgument);
  write_text(p, "node_index,value\n0,1\n5,2\n");
  CHECK_THROWS_AS(io::read_boundary_csv(p, bn), InvalidArgument);
  write_text(p, "node_index,value\n0,abc\n1,2\n");
  CHECK_THROWS_AS(io::read_boundary_csv(p, bn), InvalidArgument);
  write_text(p, "wrong,header\n0,1\n1,2\n");
  CHECK_THROWS_AS(io::read_boundary_csv(p, bn), InvalidArgument);
  CHECK_THROWS_AS(io::read_boundary_csv(scratch("missing.csv"), bn), InvalidArgument);
}

TEST_CASE("interior and trajectory CSV round-trip") {
  const InteriorField v{Eigen::Vector4d(1, 2, 3, 0.125)};
  const auto p = scratch("v.csv");
  io::write_interior_csv(p, v);
  CHECK(io::read_interior_csv(p, 4).values == v.values);
  CHECK_THROWS_AS(io::read_interior_csv(p, 5), InvalidArgument);

  Trajectory traj;
  for (int k = 0; k < 4; ++k) {
    traj.times.push_back(0.1 * k);
    traj.states.push_back({Eigen::Vector2d(k, -0.5 * k)});
    traj.step_meta.push_back({});
  }
  const std::vector<int> bn{3, 0};
  const auto q = scratch("traj.csv");
  io::write_trajectory_csv(q, traj, bn);
  const auto back = io::read_trajectory_csv(q, bn);
  REQUIRE(back.size() == traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    CHECK(back.times[k] == traj.times[k]);
    CHECK(back.states[k].values == traj.states[k].values);
  }
}

TEST_CASE("source documents") {
  using io::json;
  const std::vector<int> bn{10, 11, 12};
  const auto ind = io::source_from_json(
      json{{"type", "indicator"}, {"nodes", {11}}, {"value", 2.0}, {"t_start", 1.0}, {"t_end", 2.0}}, bn);
  CHECK(ind(1.0).values == Eigen::Vector3d::Zero());
  CHECK(ind(1.5).values == Eigen::Vector3d(0, 2, 0));
  CHECK(ind(2.0).values == Eigen::Vector3d(0, 2, 0));
  CHECK(ind(2.5).values == Eigen::Vector3d::Zero());

  const json table{{"type", "table"},
                   {"times", {0.0, 1.0}},
                   {"values", {{0, 0, 0}, {1, 2, 3}}},
                   {"interpolation", "linear"}};
  const auto lin = io::source_from_json(table, bn);
  CHECK(lin(0.5).values.isApprox(Eigen::Vector3d(0.5, 1, 1.5)));
  CHECK(lin(7.0).values == Eigen::Vector3d(1, 2, 3));
  CHECK(lin(-1.0).values == Eigen::Vector3d::Zero());
  json steps = table;
  steps.erase("interpolation");
  CHECK(io::source_from_json(steps, bn)(0.5).values == Eigen::Vector3d::Zero());

  const auto two = io::source_from_json(json{{"type", "two_point"}, {"values", {1, 0}}}, {0, 1});
  CHECK(two(3.0).values == Eigen::Vector2d(1, 0));

  CHECK_THROWS_AS(io::source_from_json(json{{"type", "two_point"}, {"values", {1, 0}}}, bn), InvalidArgument);
  CHECK_THROWS_AS(io::source_from_json(json{{"type", "ramp"}}, bn), InvalidArgument);
  CHECK_THROWS_AS(io::source_from_json(json{{"type", "indicator"}, {"nodes", {99}}}, bn), InvalidArgument);
  CHECK_THROWS_AS(io::source_from_json(json{{"type", "table"}, {"times", {1, 0}}, {"values", {{0, 0, 0}, {0, 0, 0}}}}, bn),
                  InvalidArgument);
  CHECK_THROWS_AS(io::source_from_json(json{{"values", {1}}}, bn), InvalidArgument);
}
