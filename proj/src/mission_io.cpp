#include "encounter/mission_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace encounter::mission_io {

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
  double v = it->get<double>();
  if (!std::isfinite(v)) parse_fail(source, context + ": non-finite '" + field + "'");
  return v;
}

std::string require_string(const json& obj, const char* field, const std::string& source,
                           const std::string& context) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string())
    parse_fail(source, context + ": missing or non-string field '" + field + "'");
  return it->get<std::string>();
}

const json& require_array(const json& obj, const char* field, const std::string& source) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_array())
    parse_fail(source, std::string("missing or non-array field '") + field + "'");
  return *it;
}

}  // namespace

MissionDocument parse_mission(const std::string& json_text, const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    parse_fail(source_name, e.what());
  }
  if (!doc.is_object()) parse_fail(source_name, "top-level value must be an object");

  MissionDocument mission;
  mission.mission_id = require_string(doc, "mission_id", source_name, "mission");

  if (doc.contains("origin")) {
    const json& o = doc["origin"];
    if (!o.is_object()) parse_fail(source_name, "'origin' must be an object");
    mission.origin = geometry::GeoPoint{require_number(o, "lat_deg", source_name, "origin"),
                                        require_number(o, "lon_deg", source_name, "origin")};
  }

  const json& poses = require_array(doc, "robot_poses", source_name);
  for (std::size_t i = 0; i < poses.size(); ++i) {
    std::string ctx = "robot_poses[" + std::to_string(i) + "]";
    const json& p = poses[i];
    if (!p.is_object()) parse_fail(source_name, ctx + ": must be an object");
    GeoPose pose;
    pose.t_s = require_number(p, "t_s", source_name, ctx);
    pose.position.lat_deg = require_number(p, "lat_deg", source_name, ctx);
    pose.position.lon_deg = require_number(p, "lon_deg", source_name, ctx);
    pose.heading_rad = require_number(p, "heading_rad", source_name, ctx);
    mission.robot_poses.push_back(pose);
  }

  const json odometry = doc.value("odometry", json::array());
  if (!odometry.is_array()) parse_fail(source_name, "'odometry' must be an array");
  for (std::size_t i = 0; i < odometry.size(); ++i) {
    std::string ctx = "odometry[" + std::to_string(i) + "]";
    const json& s = odometry[i];
    if (!s.is_object()) parse_fail(source_name, ctx + ": must be an object");
    mission.odometry.push_back({require_number(s, "t_s", source_name, ctx),
                                require_number(s, "v_mps", source_name, ctx),
                                require_number(s, "omega_radps", source_name, ctx)});
  }

  const json tracks = doc.value("tracks", json::array());
  if (!tracks.is_array()) parse_fail(source_name, "'tracks' must be an array");
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    std::string ctx = "tracks[" + std::to_string(i) + "]";
    const json& t = tracks[i];
    if (!t.is_object()) parse_fail(source_name, ctx + ": must be an object");
    scenario::DetectionTrack track;
    track.track_id = require_string(t, "track_id", source_name, ctx);
    const json& dets = require_array(t, "detections", source_name);
    for (std::size_t j = 0; j < dets.size(); ++j) {
      std::string dctx = ctx + ".detections[" + std::to_string(j) + "]";
      const json& d = dets[j];
      if (!d.is_object()) parse_fail(source_name, dctx + ": must be an object");
      track.detections.push_back({require_number(d, "t_s", source_name, dctx),
                                  {require_number(d, "dx_m", source_name, dctx),
                                   require_number(d, "dy_m", source_name, dctx)}});
    }
    mission.tracks.push_back(std::move(track));
  }

  return mission;
}

MissionDocument load_mission_document(const std::string& path) {
  return parse_mission(read_text_file(path), path);
}

std::string mission_to_json(const MissionDocument& doc) {
  json out;
  out["format_version"] = 1;
  out["mission_id"] = doc.mission_id;
  if (doc.origin)
    out["origin"] = {{"lat_deg", doc.origin->lat_deg}, {"lon_deg", doc.origin->lon_deg}};

  out["robot_poses"] = json::array();
  for (const auto& p : doc.robot_poses)
    out["robot_poses"].push_back({{"t_s", p.t_s},
                                  {"lat_deg", p.position.lat_deg},
                                  {"lon_deg", p.position.lon_deg},
                                  {"heading_rad", p.heading_rad}});

  out["odometry"] = json::array();
  for (const auto& s : doc.odometry)
    out["odometry"].push_back(
        {{"t_s", s.t_s}, {"v_mps", s.v_mps}, {"omega_radps", s.omega_radps}});

  out["tracks"] = json::array();
  for (const auto& t : doc.tracks) {
    json jt;
    jt["track_id"] = t.track_id;
    jt["detections"] = json::array();
    for (const auto& d : t.detections)
      jt["detections"].push_back(
          {{"t_s", d.t_s}, {"dx_m", d.offset.x_m}, {"dy_m", d.offset.y_m}});
    out["tracks"].push_back(std::move(jt));
  }
  return out.dump(2) + "\n";
}

void save_mission(const MissionDocument& doc, const std::string& path) {
  write_text_file(path, mission_to_json(doc));
}

scenario::MissionLog build_mission_log(const MissionDocument& doc,
                                       std::optional<geometry::GeoPoint> origin_override,
                                       std::vector<std::string>* warnings) {
  const std::string& src = doc.mission_id;
  if (doc.robot_poses.size() < 2)
    parse_fail(src, "mission needs at least 2 robot poses");

  geometry::GeoPoint origin = origin_override ? *origin_override
                              : doc.origin    ? *doc.origin
                                              : doc.robot_poses.front().position;
  if (!geometry::geo_valid(origin)) parse_fail(src, "projection origin outside WGS84 bounds");

  std::vector<geometry::TimedPose> poses;
  poses.reserve(doc.robot_poses.size());
  for (std::size_t i = 0; i < doc.robot_poses.size(); ++i) {
    const GeoPose& p = doc.robot_poses[i];
    if (i > 0 && !(p.t_s > doc.robot_poses[i - 1].t_s))
      parse_fail(src, "robot pose timestamps must be strictly increasing (index " +
                          std::to_string(i) + ")");
    if (!(std::fabs(p.heading_rad) <= geometry::kPi))
      parse_fail(src, "robot pose heading outside [-pi, pi] (index " + std::to_string(i) + ")");
    poses.push_back({p.t_s, geometry::project_to_local(origin, p.position), p.heading_rad});
  }

  for (std::size_t i = 1; i < doc.odometry.size(); ++i)
    if (!(doc.odometry[i].t_s > doc.odometry[i - 1].t_s))
      parse_fail(src, "odometry timestamps must be strictly increasing (index " +
                          std::to_string(i) + ")");

  std::set<std::string> track_ids;
  for (const auto& t : doc.tracks) {
    if (!track_ids.insert(t.track_id).second)
      parse_fail(src, "duplicate track id '" + t.track_id + "'");
    if (t.detections.size() < 2)
      parse_fail(src, "track '" + t.track_id + "' needs at least 2 detections");
    for (std::size_t i = 1; i < t.detections.size(); ++i)
      if (!(t.detections[i].t_s > t.detections[i - 1].t_s))
        parse_fail(src, "track '" + t.track_id + "': detection timestamps must be strictly increasing");
  }

  if (warnings && !doc.odometry.empty()) {
    double o0 = doc.odometry.front().t_s, o1 = doc.odometry.back().t_s;
    double p0 = doc.robot_poses.front().t_s, p1 = doc.robot_poses.back().t_s;
    if (o1 < p0 || o0 > p1)
      warnings->push_back(src + ": odometry span does not overlap robot pose span");
  }

  return scenario::MissionLog{doc.mission_id, origin, geometry::Trajectory(std::move(poses)),
                              doc.odometry, doc.tracks};
}

scenario::MissionLog load_mission(const std::string& path,
                                  std::optional<geometry::GeoPoint> origin_override,
                                  std::vector<std::string>* warnings) {
  return build_mission_log(load_mission_document(path), origin_override, warnings);
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

bool needs_quotes(const std::string& cell) {
  return cell.find_first_of(",\"\n\r") != std::string::npos;
}

std::string escape_cell(const std::string& cell) {
  if (!needs_quotes(cell)) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) raise(ErrorCode::InvalidArgument, "csv header must not be empty");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) text_.push_back(',');
    text_ += escape_cell(header[i]);
  }
  text_.push_back('\n');
}

void CsvWriter::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_)
    raise(ErrorCode::InvalidArgument, "csv row has wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) text_.push_back(',');
    text_ += escape_cell(cells[i]);
  }
  text_.push_back('\n');
  ++rows_;
}

std::size_t CsvTable::column(const std::string& name, const std::string& source) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  raise(ErrorCode::Parse, source + ": missing column '" + name + "'");
}

CsvTable parse_csv(const std::string& text, const std::string& source_name) {
  CsvTable table;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool row_open = false;
  std::size_t line = 1;

  auto end_cell = [&]() {
    row.push_back(std::move(cell));
    cell.clear();
  };
  auto end_row = [&]() {
    end_cell();
    if (table.header.empty()) {
      table.header = std::move(row);
    } else {
      if (row.size() != table.header.size())
        raise(ErrorCode::Parse, source_name + ": line " + std::to_string(line) + " has " +
                                    std::to_string(row.size()) + " cells, expected " +
                                    std::to_string(table.header.size()));
      table.rows.push_back(std::move(row));
    }
    row.clear();
    row_open = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; row_open = true; break;
      case ',': end_cell(); row_open = true; break;
      case '\r': break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        cell.push_back(c);
        row_open = true;
    }
  }
  if (quoted) raise(ErrorCode::Parse, source_name + ": unterminated quoted cell");
  if (row_open || !cell.empty()) end_row();  // final line without trailing newline
  if (table.header.empty()) raise(ErrorCode::Parse, source_name + ": empty document");
  return table;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::Io, "cannot write file: " + path);
  out << content;
  out.flush();
  if (!out) raise(ErrorCode::Io, "write failed: " + path);
}

}  // namespace encounter::mission_io
