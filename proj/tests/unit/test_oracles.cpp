#include <doctest.h>

#include "plimit/oracles.hpp"

using namespace plimit;

TEST_CASE("brute-force projection: three points") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Ones(3, 3);
  d.diagonal().setZero();
  const auto v = oracles::brute_force_projection(Eigen::Vector3d(0, 0, 3), Eigen::Vector3d::Ones(), d);
  CHECK(v[0] == doctest::Approx(2.0 / 3));
  CHECK(v[2] == doctest::Approx(5.0 / 3));
}

TEST_CASE("brute-force transport on a path") {
  Eigen::Matrix3d d;
  d << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  // Half of the mass moves two units, the other half stays.
  const double c = oracles::brute_force_transport(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0.5, 0, 0.5), d);
  CHECK(c == doctest::Approx(1.0));
}
