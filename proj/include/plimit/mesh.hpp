#pragma once

// Desk-scale discretizations of the domain and graph geodesics between
// boundary nodes.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace plimit {

using Point = Eigen::Vector2d;

struct Edge {
  int to;
  double length;
};

/// Simplicial mesh of an interval (dim 1) or a polygon (dim 2).
///
/// Boundary nodes come first in the node numbering and, in 2D, are ordered
/// counter-clockwise along the boundary cycle. In 1D the points carry only
/// an x coordinate (y = 0). Immutable once built.
class DomainMesh {
 public:
  /// Validates the parts and precomputes element volumes, basis gradients
  /// and the edge graph. Throws MeshError on degenerate input.
  static DomainMesh from_parts(int dim, std::vector<Point> nodes,
                               std::vector<std::array<int, 3>> elements,
                               std::vector<int> boundary_nodes,
                               std::vector<double> boundary_weights);

  int dim() const { return dim_; }
  int vertices_per_element() const { return dim_ + 1; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t element_count() const { return elements_.size(); }
  std::size_t boundary_count() const { return boundary_nodes_.size(); }

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 3>>& elements() const { return elements_; }
  const std::vector<double>& volumes() const { return volumes_; }
  /// Gradient of each barycentric basis function, constant per element.
  const std::vector<std::array<Point, 3>>& basis_gradients() const {
    return basis_gradients_;
  }
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }
  const std::vector<double>& boundary_weights() const {
    return boundary_weights_;
  }
  Eigen::VectorXd sigma() const;
  const std::vector<std::vector<Edge>>& adjacency() const { return adjacency_; }

  /// Position of a node in the boundary list, or -1 for interior nodes.
  int boundary_position(int node) const { return boundary_position_[node]; }
  bool is_boundary(int node) const { return boundary_position_[node] >= 0; }

  double volume() const;
  double boundary_measure() const;
  /// True when the boundary nodes form a closed cycle (2D meshes).
  bool boundary_is_cycle() const { return dim_ == 2; }
  double max_edge_length() const;

 private:
  int dim_ = 1;
  std::vector<Point> nodes_;
  std::vector<std::array<int, 3>> elements_;
  std::vector<double> volumes_;
  std::vector<std::array<Point, 3>> basis_gradients_;
  std::vector<int> boundary_nodes_;
  std::vector<double> boundary_weights_;
  std::vector<int> boundary_position_;
  std::vector<std::vector<Edge>> adjacency_;
};

/// Pairwise graph distances between the boundary nodes of a mesh.
struct GeodesicTable {
  std::vector<int> boundary_nodes;  // mesh node ids, row/column order
  Eigen::MatrixXd dist;

  std::size_t size() const { return boundary_nodes.size(); }
};

/// n equal segments on [0, 1]. Boundary {0, 1} with counting measure.
DomainMesh build_interval_mesh(int n);

/// Conforming triangulation of a simple polygon.
///
/// Boundary edges are split into pieces of length <= h; the interior is
/// filled with a square lattice of spacing h plus cell centers, and the
/// point set is Delaunay-triangulated. The result is checked for area
/// coverage and boundary conformity before it is returned.
DomainMesh build_polygon_mesh(std::span<const Point> vertices, double h);

std::vector<Point> unit_square();
/// Vertices of a regular `sides`-gon inscribed in the ellipse with
/// semi-axes (rx, ry), first vertex on the positive x axis.
std::vector<Point> inscribed_polygon(int sides, double rx = 1.0,
                                     double ry = 1.0);

/// Shortest-path distance over the mesh edge graph from a set of nodes.
Eigen::VectorXd geodesic_distance(const DomainMesh& mesh,
                                  std::span<const int> source_nodes);

GeodesicTable boundary_pairwise_distances(const DomainMesh& mesh);

/// max over boundary pairs of graph distance / Euclidean distance. On
/// convex domains this is the metric overestimate of the edge graph.
double max_chord_ratio(const DomainMesh& mesh, const GeodesicTable& geo);

}  // namespace plimit
