#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "encounter/geometry.hpp"

namespace encounter::roadgraph {

struct RoadNode {
  std::string id;
  geometry::GeoPoint position;
  bool junction_flag = false;  // explicit override from the graph file
  int degree = 0;              // computed from the edge list
};

struct RoadEdge {
  std::string from_id;
  std::string to_id;
};

struct RoadGraph {
  std::vector<RoadNode> nodes;
  std::vector<RoadEdge> edges;
};

/// Parse a road graph from its JSON file. Degrees are computed from the edge
/// list; an edge referencing an unknown node id is a Parse error.
RoadGraph load_graph(const std::string& path);
RoadGraph parse_graph(const std::string& json_text, const std::string& source_name = "<string>");
std::string graph_to_json(const RoadGraph& graph);
void save_graph(const RoadGraph& graph, const std::string& path);

/// Positions of junction nodes: degree >= 3, or explicitly flagged.
std::vector<geometry::GeoPoint> extract_junctions(const RoadGraph& graph);

struct JunctionStats {
  double min_m = 0.0;
  double max_m = 0.0;
  double mean_m = 0.0;
};

/// Junction positions projected into the mission-local frame, indexed on a
/// uniform grid. The grid only accelerates lookups; nearest_distance is exact.
class JunctionIndex {
 public:
  JunctionIndex(const std::vector<geometry::GeoPoint>& junctions,
                const geometry::GeoPoint& origin, double cell_size_m = 50.0);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Exact Euclidean distance to the nearest junction. NoJunction error when
  /// the index is empty.
  double nearest_distance(const geometry::LocalPoint& p) const;

 private:
  std::int64_t cell_key(std::int64_t cx, std::int64_t cy) const;

  std::vector<geometry::LocalPoint> points_;
  double cell_m_;
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> grid_;
  std::int64_t min_cx_ = 0, max_cx_ = 0, min_cy_ = 0, max_cy_ = 0;
};

/// Per-sample nearest-junction distances aggregated over a trajectory.
JunctionStats junction_distance_stats(const geometry::Trajectory& traj,
                                      const JunctionIndex& index);

/// True iff both entities ever came closer than threshold_m (strict) to a
/// junction during the scenario.
bool is_junction_scenario(const JunctionStats& robot_stats, const JunctionStats& ped_stats,
                          double threshold_m = 8.0);

}  // namespace encounter::roadgraph
