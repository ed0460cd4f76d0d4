#include "plimit/io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "plimit/error.hpp"

namespace plimit::io {

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open {}", path.string()));
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument(fmt::format("cannot write {}", path.string()));
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double to_double(const std::string& s, const fs::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (s.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument(fmt::format("{}: bad number '{}'", path.string(), s));
  }
}

int to_int(const std::string& s, const fs::path& path) {
  const double v = to_double(s, path);
  if (v != static_cast<int>(v)) {
    throw InvalidArgument(fmt::format("{}: bad node index '{}'", path.string(), s));
  }
  return static_cast<int>(v);
}

// Rows of a CSV file after checking its header.
std::vector<std::vector<std::string>> read_rows(const fs::path& path,
                                                const std::string& header,
                                                std::size_t columns) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(fmt::format("{} is empty", path.string()));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw InvalidArgument(fmt::format("{}: expected header '{}'", path.string(), header));
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != columns) {
      throw InvalidArgument(fmt::format("{}: row '{}' needs {} columns", path.string(), line,
                                        columns));
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

Eigen::VectorXd to_vector(const json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

}  // namespace

std::string format_double(double x) { return fmt::format("{}", x); }

json mesh_to_json(const DomainMesh& mesh) {
  json nodes = json::array();
  for (const Point& p : mesh.nodes()) {
    if (mesh.dim() == 1) {
      nodes.push_back({p.x()});
    } else {
      nodes.push_back({p.x(), p.y()});
    }
  }
  json elements = json::array();
  for (const auto& el : mesh.elements()) {
    if (mesh.dim() == 1) {
      elements.push_back({el[0], el[1]});
    } else {
      elements.push_back({el[0], el[1], el[2]});
    }
  }
  return json{{"nodes", nodes},
              {"elements", elements},
              {"boundary", mesh.boundary_nodes()},
              {"boundary_weights", mesh.boundary_weights()}};
}

DomainMesh mesh_from_json(const json& j) {
  try {
    const json& el = j.at("elements");
    if (el.empty()) throw InvalidArgument("mesh has no elements");
    const std::size_t arity = el.at(0).size();
    if (arity != 2 && arity != 3) throw InvalidArgument("elements must have 2 or 3 vertices");
    const int dim = static_cast<int>(arity) - 1;
    std::vector<Point> nodes;
    for (const auto& n : j.at("nodes")) {
      if (n.size() != static_cast<std::size_t>(dim) && n.size() != 2) {
        throw InvalidArgument("node coordinates do not match the element arity");
      }
      nodes.emplace_back(n.at(0).get<double>(), n.size() > 1 ? n.at(1).get<double>() : 0.0);
    }
    std::vector<std::array<int, 3>> elements;
    for (const auto& e : el) {
      if (e.size() != arity) throw InvalidArgument("elements have mixed arity");
      elements.push_back({e.at(0).get<int>(), e.at(1).get<int>(), dim == 2 ? e.at(2).get<int>() : -1});
    }
    return DomainMesh::from_parts(dim, std::move(nodes), std::move(elements),
                                  j.at("boundary").get<std::vector<int>>(),
                                  j.at("boundary_weights").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("malformed mesh document: {}", e.what()));
  }
}

json geo_to_json(const GeodesicTable& geo) {
  json dist = json::array();
  for (Eigen::Index i = 0; i < geo.dist.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < geo.dist.cols(); ++k) row.push_back(geo.dist(i, k));
    dist.push_back(std::move(row));
  }
  return json{{"boundary", geo.boundary_nodes}, {"dist", dist}};
}

GeodesicTable geo_from_json(const json& j) {
  try {
    GeodesicTable geo;
    geo.boundary_nodes = j.at("boundary").get<std::vector<int>>();
    const auto n = static_cast<Eigen::Index>(geo.boundary_nodes.size());
    const json& d = j.at("dist");
    if (static_cast<Eigen::Index>(d.size()) != n) throw InvalidArgument("dist must be B x B");
    geo.dist.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const json& row = d.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(row.size()) != n) throw InvalidArgument("dist must be B x B");
      for (Eigen::Index k = 0; k < n; ++k) {
        const double v = row.at(static_cast<std::size_t>(k)).get<double>();
        if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("distances must be finite and nonnegative");
        geo.dist(i, k) = v;
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (geo.dist(i, i) != 0.0) throw InvalidArgument("dist must vanish on the diagonal");
      for (Eigen::Index k = 0; k < i; ++k) {
        if (std::abs(geo.dist(i, k) - geo.dist(k, i)) > 1e-12 * (1.0 + geo.dist(i, k))) {
          throw InvalidArgument("dist must be symmetric");
        }
      }
    }
    return geo;
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("malformed geodesic document: {}", e.what()));
  }
}

std::vector<int> boundary_positions(const std::vector<int>& node_ids,
                                    const std::vector<int>& boundary_nodes) {
  std::map<int, int> pos;
  for (std::size_t b = 0; b < boundary_nodes.size(); ++b) pos[boundary_nodes[b]] = static_cast<int>(b);
  std::vector<int> out;
  for (int id : node_ids) {
    const auto it = pos.find(id);
    if (it == pos.end()) throw InvalidArgument(fmt::format("node {} is not a boundary node", id));
    out.push_back(it->second);
  }
  return out;
}

SourceTerm source_from_json(const json& j, const std::vector<int>& boundary_nodes) {
  const auto B = static_cast<Eigen::Index>(boundary_nodes.size());
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "two_point") {
      if (B != 2) throw InvalidArgument("two_point sources need exactly two boundary nodes");
      const Eigen::VectorXd v = to_vector(j.at("values"));
      if (v.size() != 2 || !v.allFinite()) throw InvalidArgument("two_point needs two finite values");
      return constant_source(BoundaryField{v});
    }
    if (type == "indicator") {
      const auto pos = boundary_positions(j.at("nodes").get<std::vector<int>>(), boundary_nodes);
      const double value = j.value("value", 1.0);
      const double t0 = j.value("t_start", 0.0);
      const double t1 = j.contains("t_end") && !j.at("t_end").is_null()
                            ? j.at("t_end").get<double>()
                            : std::numeric_limits<double>::infinity();
      if (!std::isfinite(value) || !(t1 > t0)) throw InvalidArgument("bad indicator source");
      Eigen::VectorXd on = Eigen::VectorXd::Zero(B);
      for (int p : pos) on[p] = value;
      return {[on, t0, t1](double t) {
                return BoundaryField{t > t0 && t <= t1 ? on : Eigen::VectorXd::Zero(on.size())};
              },
              TimeRegularity::PiecewiseConstant};
    }
    if (type == "table") {
      const auto times = j.at("times").get<std::vector<double>>();
      const json& vals = j.at("values");
      if (times.empty() || vals.size() != times.size()) {
        throw InvalidArgument("table needs one value row per time");
      }
      std::vector<Eigen::VectorXd> rows;
      for (std::size_t k = 0; k < times.size(); ++k) {
        if (k > 0 && !(times[k] > times[k - 1])) throw InvalidArgument("table times must increase");
        rows.push_back(to_vector(vals.at(k)));
        if (rows.back().size() != B || !rows.back().allFinite()) {
          throw InvalidArgument("table rows must hold one finite value per boundary node");
        }
      }
      const std::string interp = j.value("interpolation", "constant");
      if (interp != "constant" && interp != "linear") {
        throw InvalidArgument("table interpolation must be constant or linear");
      }
      const bool linear = interp == "linear";
      return {[times, rows, linear](double t) {
                const auto it = std::upper_bound(times.begin(), times.end(), t);
                if (it == times.begin()) return BoundaryField{rows.front()};
                const auto k = static_cast<std::size_t>(it - times.begin()) - 1;
                if (!linear || k + 1 == times.size()) return BoundaryField{rows[k]};
                const double s = (t - times[k]) / (times[k + 1] - times[k]);
                return BoundaryField{(1.0 - s) * rows[k] + s * rows[k + 1]};
              },
              linear ? TimeRegularity::Continuous : TimeRegularity::PiecewiseConstant};
    }
    throw InvalidArgument(fmt::format("unknown source type '{}'", type));
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("malformed source document: {}", e.what()));
  }
}

json read_json(const fs::path& path) {
  std::ifstream in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_json(const fs::path& path, const json& j) { open_out(path) << dump_json(j); }

void write_boundary_csv(const fs::path& path, const BoundaryField& u,
                        const std::vector<int>& boundary_nodes) {
  if (u.size() != static_cast<Eigen::Index>(boundary_nodes.size())) {
    throw InvalidArgument("field size does not match the boundary");
  }
  std::ofstream out = open_out(path);
  out << "node_index,value\n";
  for (std::size_t b = 0; b < boundary_nodes.size(); ++b) {
    out << boundary_nodes[b] << ',' << format_double(u[static_cast<Eigen::Index>(b)]) << '\n';
  }
}

BoundaryField read_boundary_csv(const fs::path& path, const std::vector<int>& boundary_nodes) {
  const auto rows = read_rows(path, "node_index,value", 2);
  std::map<int, int> pos;
  for (std::size_t b = 0; b < boundary_nodes.size(); ++b) pos[boundary_nodes[b]] = static_cast<int>(b);
  BoundaryField u{Eigen::VectorXd::Constant(static_cast<Eigen::Index>(boundary_nodes.size()),
                                            std::numeric_limits<double>::quiet_NaN())};
  for (const auto& r : rows) {
    const int id = to_int(r[0], path);
    const auto it = pos.find(id);
    if (it == pos.end()) {
      throw InvalidArgument(fmt::format("{}: node {} is not a boundary node", path.string(), id));
    }
    if (!std::isnan(u[it->second])) {
      throw InvalidArgument(fmt::format("{}: node {} listed twice", path.string(), id));
    }
    u[it->second] = to_double(r[1], path);
  }
  if (!u.values.allFinite()) {
    throw InvalidArgument(fmt::format("{}: every boundary node needs one finite value", path.string()));
  }
  return u;
}

void write_interior_csv(const fs::path& path, const InteriorField& v) {
  std::ofstream out = open_out(path);
  out << "node_index,value\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) out << i << ',' << format_double(v[i]) << '\n';
}

InteriorField read_interior_csv(const fs::path& path, std::size_t node_count) {
  const auto rows = read_rows(path, "node_index,value", 2);
  InteriorField v{Eigen::VectorXd::Constant(static_cast<Eigen::Index>(node_count),
                                            std::numeric_limits<double>::quiet_NaN())};
  for (const auto& r : rows) {
    const int id = to_int(r[0], path);
    if (id < 0 || static_cast<std::size_t>(id) >= node_count || !std::isnan(v[id])) {
      throw InvalidArgument(fmt::format("{}: bad or repeated node {}", path.string(), id));
    }
    v[id] = to_double(r[1], path);
  }
  if (!v.values.allFinite()) {
    throw InvalidArgument(fmt::format("{}: every node needs one finite value", path.string()));
  }
  return v;
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj,
                          const std::vector<int>& boundary_nodes) {
  traj.validate();
  std::ofstream out = open_out(path);
  out << "t,node_index,value\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const std::string t = format_double(traj.times[k]);
    for (std::size_t b = 0; b < boundary_nodes.size(); ++b) {
      out << t << ',' << boundary_nodes[b] << ','
          << format_double(traj.states[k][static_cast<Eigen::Index>(b)]) << '\n';
    }
  }
}

Trajectory read_trajectory_csv(const fs::path& path, const std::vector<int>& boundary_nodes) {
  const auto rows = read_rows(path, "t,node_index,value", 3);
  std::map<int, int> pos;
  for (std::size_t b = 0; b < boundary_nodes.size(); ++b) pos[boundary_nodes[b]] = static_cast<int>(b);
  const auto B = static_cast<Eigen::Index>(boundary_nodes.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Trajectory traj;
  for (const auto& r : rows) {
    const double t = to_double(r[0], path);
    if (traj.times.empty() || t != traj.times.back()) {
      traj.times.push_back(t);
      traj.states.push_back(BoundaryField{Eigen::VectorXd::Constant(B, nan)});
      traj.step_meta.push_back({});
    }
    const int id = to_int(r[1], path);
    const auto it = pos.find(id);
    if (it == pos.end() || !std::isnan(traj.states.back()[it->second])) {
      throw InvalidArgument(fmt::format("{}: bad or repeated node {} at t = {}", path.string(), id, t));
    }
    traj.states.back()[it->second] = to_double(r[2], path);
  }
  if (traj.times.empty()) throw InvalidArgument(fmt::format("{} has no rows", path.string()));
  traj.validate();
  return traj;
}

}  // namespace plimit::io
