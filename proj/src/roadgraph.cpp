#include "encounter/roadgraph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace encounter::roadgraph {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& source, const std::string& what) {
  raise(ErrorCode::Parse, source + ": " + what);
}

double require_number(const json& obj, const char* field, const std::string& source,
                      const std::string& context) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_number())
    parse_fail(source, context + ": missing or non-numeric field '" + field + "'");
  return it->get<double>();
}

std::string require_string(const json& obj, const char* field, const std::string& source,
                           const std::string& context) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string())
    parse_fail(source, context + ": missing or non-string field '" + field + "'");
  return it->get<std::string>();
}

}  // namespace

RoadGraph parse_graph(const std::string& json_text, const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    parse_fail(source_name, e.what());
  }
  if (!doc.is_object()) parse_fail(source_name, "top-level value must be an object");

  RoadGraph graph;
  std::unordered_map<std::string, std::size_t> by_id;

  const json nodes = doc.value("nodes", json::array());
  if (!nodes.is_array()) parse_fail(source_name, "'nodes' must be an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& n = nodes[i];
    std::string ctx = "nodes[" + std::to_string(i) + "]";
    if (!n.is_object()) parse_fail(source_name, ctx + ": must be an object");
    RoadNode node;
    node.id = require_string(n, "id", source_name, ctx);
    node.position.lat_deg = require_number(n, "lat_deg", source_name, ctx);
    node.position.lon_deg = require_number(n, "lon_deg", source_name, ctx);
    if (!geometry::geo_valid(node.position))
      parse_fail(source_name, ctx + ": coordinates outside WGS84 bounds");
    if (n.contains("junction")) {
      if (!n["junction"].is_boolean()) parse_fail(source_name, ctx + ": 'junction' must be a bool");
      node.junction_flag = n["junction"].get<bool>();
    }
    if (by_id.count(node.id)) parse_fail(source_name, ctx + ": duplicate node id '" + node.id + "'");
    by_id[node.id] = graph.nodes.size();
    graph.nodes.push_back(std::move(node));
  }

  const json edges = doc.value("edges", json::array());
  if (!edges.is_array()) parse_fail(source_name, "'edges' must be an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const json& e = edges[i];
    std::string ctx = "edges[" + std::to_string(i) + "]";
    if (!e.is_object()) parse_fail(source_name, ctx + ": must be an object");
    RoadEdge edge;
    edge.from_id = require_string(e, "from", source_name, ctx);
    edge.to_id = require_string(e, "to", source_name, ctx);
    for (const std::string* id : {&edge.from_id, &edge.to_id}) {
      auto it = by_id.find(*id);
      if (it == by_id.end())
        parse_fail(source_name, ctx + ": edge references unknown node id '" + *id + "'");
      graph.nodes[it->second].degree += 1;
    }
    graph.edges.push_back(std::move(edge));
  }

  return graph;
}

RoadGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open graph file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str(), path);
}

std::string graph_to_json(const RoadGraph& graph) {
  json doc;
  doc["format_version"] = 1;
  doc["nodes"] = json::array();
  for (const auto& n : graph.nodes) {
    json jn;
    jn["id"] = n.id;
    jn["lat_deg"] = n.position.lat_deg;
    jn["lon_deg"] = n.position.lon_deg;
    if (n.junction_flag) jn["junction"] = true;
    doc["nodes"].push_back(std::move(jn));
  }
  doc["edges"] = json::array();
  for (const auto& e : graph.edges) doc["edges"].push_back(json{{"from", e.from_id}, {"to", e.to_id}});
  return doc.dump(2) + "\n";
}

void save_graph(const RoadGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::Io, "cannot write graph file: " + path);
  out << graph_to_json(graph);
  if (!out) raise(ErrorCode::Io, "write failed: " + path);
}

std::vector<geometry::GeoPoint> extract_junctions(const RoadGraph& graph) {
  std::vector<geometry::GeoPoint> out;
  for (const auto& n : graph.nodes)
    if (n.degree >= 3 || n.junction_flag) out.push_back(n.position);
  return out;
}

JunctionIndex::JunctionIndex(const std::vector<geometry::GeoPoint>& junctions,
                             const geometry::GeoPoint& origin, double cell_size_m)
    : cell_m_(cell_size_m) {
  if (!(cell_size_m > 0.0)) raise(ErrorCode::InvalidArgument, "cell size must be positive");
  points_.reserve(junctions.size());
  for (const auto& j : junctions) points_.push_back(geometry::project_to_local(origin, j));

  bool first = true;
  for (std::uint32_t i = 0; i < points_.size(); ++i) {
    auto cx = static_cast<std::int64_t>(std::floor(points_[i].x_m / cell_m_));
    auto cy = static_cast<std::int64_t>(std::floor(points_[i].y_m / cell_m_));
    grid_[cell_key(cx, cy)].push_back(i);
    if (first) {
      min_cx_ = max_cx_ = cx;
      min_cy_ = max_cy_ = cy;
      first = false;
    } else {
      min_cx_ = std::min(min_cx_, cx);
      max_cx_ = std::max(max_cx_, cx);
      min_cy_ = std::min(min_cy_, cy);
      max_cy_ = std::max(max_cy_, cy);
    }
  }
}

std::int64_t JunctionIndex::cell_key(std::int64_t cx, std::int64_t cy) const {
  return (cx << 32) ^ (cy & 0xffffffffLL);
}

double JunctionIndex::nearest_distance(const geometry::LocalPoint& p) const {
  if (points_.empty()) raise(ErrorCode::NoJunction, "junction index is empty");

  auto qx = static_cast<std::int64_t>(std::floor(p.x_m / cell_m_));
  auto qy = static_cast<std::int64_t>(std::floor(p.y_m / cell_m_));

  // Widest ring that can still contain an occupied cell.
  std::int64_t r_max = 0;
  r_max = std::max(r_max, std::llabs(qx - min_cx_));
  r_max = std::max(r_max, std::llabs(qx - max_cx_));
  r_max = std::max(r_max, std::llabs(qy - min_cy_));
  r_max = std::max(r_max, std::llabs(qy - max_cy_));

  double best_sq = std::numeric_limits<double>::infinity();
  for (std::int64_t r = 0; r <= r_max; ++r) {
    // A cell in ring r is at least (r-1)*cell away from any point of the
    // query cell, so once best is inside that bound the scan can stop.
    if (best_sq < std::numeric_limits<double>::infinity() && r >= 2) {
      double lower = static_cast<double>(r - 1) * cell_m_;
      if (lower * lower > best_sq) break;
    }
    for (std::int64_t cx = qx - r; cx <= qx + r; ++cx) {
      for (std::int64_t cy = qy - r; cy <= qy + r; ++cy) {
        if (std::max(std::llabs(cx - qx), std::llabs(cy - qy)) != r) continue;
        auto it = grid_.find(cell_key(cx, cy));
        if (it == grid_.end()) continue;
        for (std::uint32_t i : it->second) {
          double dx = points_[i].x_m - p.x_m;
          double dy = points_[i].y_m - p.y_m;
          best_sq = std::min(best_sq, dx * dx + dy * dy);
        }
      }
    }
  }
  return std::sqrt(best_sq);
}

JunctionStats junction_distance_stats(const geometry::Trajectory& traj,
                                      const JunctionIndex& index) {
  JunctionStats stats;
  stats.min_m = std::numeric_limits<double>::infinity();
  stats.max_m = 0.0;
  double sum = 0.0;
  for (const auto& s : traj.samples()) {
    double d = index.nearest_distance(s.position);
    stats.min_m = std::min(stats.min_m, d);
    stats.max_m = std::max(stats.max_m, d);
    sum += d;
  }
  stats.mean_m = sum / static_cast<double>(traj.size());
  return stats;
}

bool is_junction_scenario(const JunctionStats& robot_stats, const JunctionStats& ped_stats,
                          double threshold_m) {
  return robot_stats.min_m < threshold_m && ped_stats.min_m < threshold_m;
}

}  // namespace encounter::roadgraph
