#pragma once

#include <optional>
#include <string>
#include <vector>

#include "encounter/geometry.hpp"
#include "encounter/scenario.hpp"

namespace encounter::mission_io {

/// Robot pose as stored in mission files: WGS84 position plus heading.
struct GeoPose {
  double t_s = 0.0;
  geometry::GeoPoint position;
  double heading_rad = 0.0;
};

/// File-facing mission record (coordinates still geographic).
struct MissionDocument {
  std::string mission_id;
  std::optional<geometry::GeoPoint> origin;  // defaults to the first robot pose
  std::vector<GeoPose> robot_poses;
  std::vector<scenario::OdometrySample> odometry;
  std::vector<scenario::DetectionTrack> tracks;
};

MissionDocument parse_mission(const std::string& json_text,
                              const std::string& source_name = "<string>");
MissionDocument load_mission_document(const std::string& path);
std::string mission_to_json(const MissionDocument& doc);
void save_mission(const MissionDocument& doc, const std::string& path);

/// Validate a document and project it into its local tangent frame. The
/// projection origin is origin_override, else the document origin, else the
/// first robot pose. Warnings (e.g. odometry not overlapping poses) are
/// appended to `warnings` when given.
scenario::MissionLog build_mission_log(const MissionDocument& doc,
                                       std::optional<geometry::GeoPoint> origin_override = {},
                                       std::vector<std::string>* warnings = nullptr);

scenario::MissionLog load_mission(const std::string& path,
                                  std::optional<geometry::GeoPoint> origin_override = {},
                                  std::vector<std::string>* warnings = nullptr);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// RFC 4180 comma-separated output with a fixed header row.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  std::size_t row_count() const { return rows_; }

  /// Full document text (header + rows, LF line endings).
  std::string str() const { return text_; }

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; Parse error when absent.
  std::size_t column(const std::string& name, const std::string& source) const;
};

CsvTable parse_csv(const std::string& text, const std::string& source_name = "<string>");

std::string sha256_hex(const std::string& bytes);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace encounter::mission_io
