#include "plimit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <utility>

#include <fmt/format.h>

#include "plimit/error.hpp"

namespace plimit {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(std::span<const Point> poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    a += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * a;
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (a + s * ab - p).norm();
}

int orient_sign(const Point& a, const Point& b, const Point& c) {
  const double v = cross(b - a, c - a);
  const double scale = (b - a).norm() * (c - a).norm();
  if (std::abs(v) <= 1e-14 * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Point& a, const Point& b, const Point& p) {
  return std::min(a.x(), b.x()) - 1e-14 <= p.x() &&
         p.x() <= std::max(a.x(), b.x()) + 1e-14 &&
         std::min(a.y(), b.y()) - 1e-14 <= p.y() &&
         p.y() <= std::max(a.y(), b.y()) + 1e-14;
}

bool segments_touch(const Point& a, const Point& b, const Point& c,
                    const Point& d) {
  const int o1 = orient_sign(a, b, c), o2 = orient_sign(a, b, d);
  const int o3 = orient_sign(c, d, a), o4 = orient_sign(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool point_in_polygon(const Point& p, std::span<const Point> poly) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

void check_simple(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if ((poly[i] - poly[(i + 1) % n]).norm() == 0.0) {
      throw InvalidArgument("polygon has a repeated vertex");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_touch(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) {
        throw InvalidArgument(
            fmt::format("polygon is self-intersecting (edges {} and {})", i, j));
      }
    }
  }
}

struct Triangle {
  std::array<int, 3> v;
  Point center;
  double radius2;
  bool alive;
};

Triangle make_triangle(const std::vector<Point>& pts, int a, int b, int c) {
  if (cross(pts[b] - pts[a], pts[c] - pts[a]) < 0) std::swap(b, c);
  const Point& A = pts[a];
  const Point B = pts[b] - A;
  const Point C = pts[c] - A;
  const double d = 2.0 * cross(B, C);
  const Point u((C.y() * B.squaredNorm() - B.y() * C.squaredNorm()) / d,
                (B.x() * C.squaredNorm() - C.x() * B.squaredNorm()) / d);
  return {{a, b, c}, A + u, u.squaredNorm(), true};
}

// Incremental Bowyer-Watson. Returns triangles over the input points only.
std::vector<std::array<int, 3>> delaunay(const std::vector<Point>& input) {
  std::vector<Point> pts = input;
  Point lo = pts.front(), hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double span = std::max((hi - lo).maxCoeff(), 1e-12);
  const Point mid = 0.5 * (lo + hi);
  const int n = static_cast<int>(pts.size());
  pts.emplace_back(mid + Point(-100.0 * span, -100.0 * span));
  pts.emplace_back(mid + Point(100.0 * span, -100.0 * span));
  pts.emplace_back(mid + Point(0.0, 100.0 * span));

  std::vector<Triangle> tris{make_triangle(pts, n, n + 1, n + 2)};
  std::vector<std::pair<int, int>> boundary;
  for (int i = 0; i < n; ++i) {
    const Point& p = pts[i];
    std::map<std::pair<int, int>, int> edge_count;
    for (auto& t : tris) {
      if (!t.alive) continue;
      const double d2 = (p - t.center).squaredNorm();
      if (d2 < t.radius2 * (1.0 - 1e-12)) {
        t.alive = false;
        for (int k = 0; k < 3; ++k) {
          int a = t.v[k], b = t.v[(k + 1) % 3];
          ++edge_count[{std::min(a, b), std::max(a, b)}];
        }
      }
    }
    boundary.clear();
    for (const auto& [e, c] : edge_count) {
      if (c == 1) boundary.push_back(e);
    }
    std::erase_if(tris, [](const Triangle& t) { return !t.alive; });
    for (const auto& [a, b] : boundary) {
      tris.push_back(make_triangle(pts, a, b, i));
    }
  }

  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris) {
    if (t.v[0] < n && t.v[1] < n && t.v[2] < n) out.push_back(t.v);
  }
  return out;
}

}  // namespace

DomainMesh DomainMesh::from_parts(int dim, std::vector<Point> nodes,
                                  std::vector<std::array<int, 3>> elements,
                                  std::vector<int> boundary_nodes,
                                  std::vector<double> boundary_weights) {
  if (dim != 1 && dim != 2) throw MeshError("mesh dimension must be 1 or 2");
  if (nodes.empty() || elements.empty()) throw MeshError("empty mesh");
  if (boundary_nodes.size() != boundary_weights.size() || boundary_nodes.empty()) {
    throw MeshError("boundary node and weight lists must be nonempty and equal length");
  }
  DomainMesh m;
  m.dim_ = dim;
  m.nodes_ = std::move(nodes);
  m.elements_ = std::move(elements);
  m.boundary_nodes_ = std::move(boundary_nodes);
  m.boundary_weights_ = std::move(boundary_weights);
  const int nn = static_cast<int>(m.nodes_.size());

  m.boundary_position_.assign(nn, -1);
  for (std::size_t i = 0; i < m.boundary_nodes_.size(); ++i) {
    const int b = m.boundary_nodes_[i];
    if (b < 0 || b >= nn) throw MeshError("boundary node index out of range");
    if (m.boundary_position_[b] >= 0) throw MeshError("duplicate boundary node");
    if (!(m.boundary_weights_[i] > 0.0)) throw MeshError("boundary weights must be positive");
    m.boundary_position_[b] = static_cast<int>(i);
  }

  const int nv = dim + 1;
  std::map<std::pair<int, int>, double> edges;
  m.volumes_.reserve(m.elements_.size());
  m.basis_gradients_.reserve(m.elements_.size());
  for (auto& el : m.elements_) {
    for (int k = 0; k < nv; ++k) {
      if (el[k] < 0 || el[k] >= nn) throw MeshError("element index out of range");
    }
    std::array<Point, 3> grads{Point::Zero(), Point::Zero(), Point::Zero()};
    double vol = 0.0;
    if (dim == 1) {
      el[2] = -1;
      if (m.nodes_[el[1]].x() < m.nodes_[el[0]].x()) std::swap(el[0], el[1]);
      vol = m.nodes_[el[1]].x() - m.nodes_[el[0]].x();
      if (!(vol > 0.0)) throw MeshError("degenerate segment");
      grads[0] = Point(-1.0 / vol, 0.0);
      grads[1] = Point(1.0 / vol, 0.0);
    } else {
      double a2 = cross(m.nodes_[el[1]] - m.nodes_[el[0]], m.nodes_[el[2]] - m.nodes_[el[0]]);
      if (a2 < 0) {
        std::swap(el[1], el[2]);
        a2 = -a2;
      }
      vol = 0.5 * a2;
      if (!(vol > 0.0)) throw MeshError("degenerate triangle");
      for (int k = 0; k < 3; ++k) {
        const Point& p1 = m.nodes_[el[(k + 1) % 3]];
        const Point& p2 = m.nodes_[el[(k + 2) % 3]];
        grads[k] = Point(p1.y() - p2.y(), p2.x() - p1.x()) / a2;
      }
    }
    m.volumes_.push_back(vol);
    m.basis_gradients_.push_back(grads);
    for (int a = 0; a < nv; ++a) {
      for (int b = a + 1; b < nv; ++b) {
        const int i = std::min(el[a], el[b]), j = std::max(el[a], el[b]);
        edges[{i, j}] = (m.nodes_[i] - m.nodes_[j]).norm();
      }
    }
  }
  m.adjacency_.assign(nn, {});
  for (const auto& [e, len] : edges) {
    m.adjacency_[e.first].push_back({e.second, len});
    m.adjacency_[e.second].push_back({e.first, len});
  }
  return m;
}

Eigen::VectorXd DomainMesh::sigma() const {
  return Eigen::Map<const Eigen::VectorXd>(boundary_weights_.data(),
                                           static_cast<Eigen::Index>(boundary_weights_.size()));
}

double DomainMesh::volume() const {
  double v = 0.0;
  for (double x : volumes_) v += x;
  return v;
}

double DomainMesh::boundary_measure() const {
  double s = 0.0;
  for (double w : boundary_weights_) s += w;
  return s;
}

double DomainMesh::max_edge_length() const {
  double m = 0.0;
  for (const auto& nb : adjacency_) {
    for (const auto& e : nb) m = std::max(m, e.length);
  }
  return m;
}

DomainMesh build_interval_mesh(int n) {
  if (n < 1) throw InvalidArgument("interval mesh needs n >= 1");
  std::vector<Point> nodes;
  nodes.reserve(n + 1);
  // Boundary nodes first: x = 0 then x = 1.
  nodes.emplace_back(0.0, 0.0);
  nodes.emplace_back(1.0, 0.0);
  for (int i = 1; i < n; ++i) nodes.emplace_back(static_cast<double>(i) / n, 0.0);
  auto id = [n](int i) { return i == 0 ? 0 : (i == n ? 1 : i + 1); };
  std::vector<std::array<int, 3>> elements;
  for (int i = 0; i < n; ++i) elements.push_back({id(i), id(i + 1), -1});
  return DomainMesh::from_parts(1, std::move(nodes), std::move(elements), {0, 1},
                                {1.0, 1.0});
}

DomainMesh build_polygon_mesh(std::span<const Point> vertices, double h) {
  if (vertices.size() < 3) throw InvalidArgument("polygon needs at least 3 vertices");
  if (!(h > 0.0)) throw InvalidArgument("mesh size h must be positive");
  std::vector<Point> poly(vertices.begin(), vertices.end());
  check_simple(poly);
  if (signed_area(poly) < 0) std::reverse(poly.begin(), poly.end());

  double diameter = 0.0;
  for (const auto& a : poly) {
    for (const auto& b : poly) diameter = std::max(diameter, (a - b).norm());
  }
  if (h > diameter) {
    throw InvalidArgument(fmt::format("h = {} exceeds the polygon diameter {}", h, diameter));
  }

  std::vector<Point> pts;
  const std::size_t nv = poly.size();
  for (std::size_t i = 0; i < nv; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % nv];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / h - 1e-9)));
    for (int k = 0; k < pieces; ++k) {
      pts.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
    }
  }
  const int nb = static_cast<int>(pts.size());

  auto boundary_dist = [&](const Point& p) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nv; ++i) {
      d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % nv]));
    }
    return d;
  };
  Point lo = poly.front(), hi = poly.front();
  for (const auto& p : poly) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const int nx = static_cast<int>(std::floor((hi.x() - lo.x()) / h + 1e-9));
  const int ny = static_cast<int>(std::floor((hi.y() - lo.y()) / h + 1e-9));
  const double keep = 0.5 * h * (1.0 - 1e-9);
  auto try_add = [&](const Point& p) {
    if (point_in_polygon(p, poly) && boundary_dist(p) >= keep) pts.push_back(p);
  };
  for (int j = 0; j <= ny + 1; ++j) {
    for (int i = 0; i <= nx + 1; ++i) {
      try_add(lo + Point(i * h, j * h));
      try_add(lo + Point((i + 0.5) * h, (j + 0.5) * h));
    }
  }

  std::vector<std::array<int, 3>> tris;
  for (const auto& t : delaunay(pts)) {
    const Point c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
    const double a2 = cross(pts[t[1]] - pts[t[0]], pts[t[2]] - pts[t[0]]);
    if (std::abs(a2) <= 1e-12 * h * h) continue;
    if (point_in_polygon(c, poly)) tris.push_back(t);
  }

  // Coverage and conformity checks.
  double area = 0.0;
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : tris) {
    area += 0.5 * std::abs(cross(pts[t[1]] - pts[t[0]], pts[t[2]] - pts[t[0]]));
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      ++edge_count[{std::min(a, b), std::max(a, b)}];
    }
  }
  const double exact = signed_area(poly);
  if (std::abs(area - exact) > 1e-9 * exact) {
    throw MeshError(fmt::format("triangulation covers area {} instead of {}", area, exact));
  }
  for (int i = 0; i < nb; ++i) {
    const int j = (i + 1) % nb;
    const auto it = edge_count.find({std::min(i, j), std::max(i, j)});
    if (it == edge_count.end() || it->second != 1) {
      throw MeshError("boundary segment missing from triangulation; reduce h");
    }
  }
  for (const auto& [e, c] : edge_count) {
    if (c > 2) throw MeshError("non-manifold edge in triangulation");
    const bool on_boundary =
        e.first < nb && e.second < nb &&
        (e.second - e.first == 1 || (e.first == 0 && e.second == nb - 1));
    if (c == 1 && !on_boundary) throw MeshError("hole in triangulation");
  }

  std::vector<int> bnodes(nb);
  std::vector<double> weights(nb);
  for (int i = 0; i < nb; ++i) {
    bnodes[i] = i;
    const Point& prev = pts[(i + nb - 1) % nb];
    const Point& next = pts[(i + 1) % nb];
    weights[i] = 0.5 * ((pts[i] - prev).norm() + (next - pts[i]).norm());
  }
  return DomainMesh::from_parts(2, std::move(pts), std::move(tris), std::move(bnodes),
                                std::move(weights));
}

std::vector<Point> unit_square() {
  return {Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};
}

std::vector<Point> inscribed_polygon(int sides, double rx, double ry) {
  if (sides < 3) throw InvalidArgument("polygon needs at least 3 sides");
  std::vector<Point> v;
  v.reserve(sides);
  for (int k = 0; k < sides; ++k) {
    const double th = 2.0 * std::numbers::pi * k / sides;
    v.emplace_back(rx * std::cos(th), ry * std::sin(th));
  }
  return v;
}

Eigen::VectorXd geodesic_distance(const DomainMesh& mesh,
                                  std::span<const int> source_nodes) {
  if (source_nodes.empty()) throw InvalidArgument("geodesic source set is empty");
  const int n = static_cast<int>(mesh.node_count());
  Eigen::VectorXd dist =
      Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (int s : source_nodes) {
    if (s < 0 || s >= n) throw InvalidArgument("geodesic source index out of range");
    dist[s] = 0.0;
    queue.emplace(0.0, s);
  }
  const auto& adj = mesh.adjacency();
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const auto& e : adj[u]) {
      const double nd = d + e.length;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        queue.emplace(nd, e.to);
      }
    }
  }
  if (!dist.allFinite()) throw MeshError("mesh edge graph is disconnected");
  return dist;
}

GeodesicTable boundary_pairwise_distances(const DomainMesh& mesh) {
  const auto& bn = mesh.boundary_nodes();
  const auto nb = static_cast<Eigen::Index>(bn.size());
  GeodesicTable geo{bn, Eigen::MatrixXd::Zero(nb, nb)};
  for (Eigen::Index i = 0; i < nb; ++i) {
    const int src = bn[i];
    const Eigen::VectorXd d = geodesic_distance(mesh, std::span<const int>(&src, 1));
    for (Eigen::Index j = 0; j < nb; ++j) geo.dist(i, j) = d[bn[j]];
  }
  const Eigen::MatrixXd sym = 0.5 * (geo.dist + geo.dist.transpose());
  geo.dist = sym;
  geo.dist.diagonal().setZero();
  return geo;
}

double max_chord_ratio(const DomainMesh& mesh, const GeodesicTable& geo) {
  double r = 1.0;
  const auto n = static_cast<Eigen::Index>(geo.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double chord =
          (mesh.nodes()[geo.boundary_nodes[i]] - mesh.nodes()[geo.boundary_nodes[j]]).norm();
      if (chord > 0.0) r = std::max(r, geo.dist(i, j) / chord);
    }
  }
  return r;
}

}  // namespace plimit
