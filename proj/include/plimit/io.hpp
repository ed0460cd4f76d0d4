#pragma once

// File formats: meshes, geodesic tables and sources as JSON; fields and
// trajectories as CSV keyed by mesh node index.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "plimit/fields.hpp"
#include "plimit/mesh.hpp"
#include "plimit/proxflow.hpp"

namespace plimit::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// Shortest decimal that round-trips the double.
std::string format_double(double x);

json mesh_to_json(const DomainMesh& mesh);
/// The dimension is inferred from element arity (2 for intervals, 3 for
/// triangles).
DomainMesh mesh_from_json(const json& j);

json geo_to_json(const GeodesicTable& geo);
GeodesicTable geo_from_json(const json& j);

/// Source document types:
///   {"type": "two_point", "values": [f0, f1]}
///   {"type": "indicator", "nodes": [ids], "value": 1, "t_start": 0, "t_end": null}
///   {"type": "table", "times": [...], "values": [[...], ...],
///    "interpolation": "constant" | "linear"}
/// Indicator nodes are mesh node ids; table rows are in boundary order.
/// Indicator sources are active on t_start < t <= t_end.
SourceTerm source_from_json(const json& j, const std::vector<int>& boundary_nodes);

json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& j);
/// Serializes with round-trip doubles and NaN written as null.
std::string dump_json(const json& j);

/// CSV with header node_index,value, one row per boundary node.
void write_boundary_csv(const fs::path& path, const BoundaryField& u,
                        const std::vector<int>& boundary_nodes);
BoundaryField read_boundary_csv(const fs::path& path, const std::vector<int>& boundary_nodes);

void write_interior_csv(const fs::path& path, const InteriorField& v);
InteriorField read_interior_csv(const fs::path& path, std::size_t node_count);

/// CSV with header t,node_index,value, rows ordered by time then node.
void write_trajectory_csv(const fs::path& path, const Trajectory& traj,
                          const std::vector<int>& boundary_nodes);
Trajectory read_trajectory_csv(const fs::path& path, const std::vector<int>& boundary_nodes);

/// Boundary positions of the given node ids; throws on a non-boundary id.
std::vector<int> boundary_positions(const std::vector<int>& node_ids,
                                    const std::vector<int>& boundary_nodes);

}  // namespace plimit::io
