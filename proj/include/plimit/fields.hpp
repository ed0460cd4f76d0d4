#pragma once

#include <cmath>

#include <Eigen/Core>

namespace plimit {

/// One value per boundary node, in the mesh's boundary order.
struct BoundaryField {
  Eigen::VectorXd values;

  Eigen::Index size() const { return values.size(); }
  double operator[](Eigen::Index i) const { return values[i]; }
  double& operator[](Eigen::Index i) { return values[i]; }
};

/// One value per mesh node.
struct InteriorField {
  Eigen::VectorXd values;

  Eigen::Index size() const { return values.size(); }
  double operator[](Eigen::Index i) const { return values[i]; }
  double& operator[](Eigen::Index i) { return values[i]; }
};

/// sqrt(sum_i w_i a_i^2)
inline double weighted_l2(const Eigen::VectorXd& a, const Eigen::VectorXd& w) {
  return std::sqrt((w.array() * a.array().square()).sum());
}

}  // namespace plimit
