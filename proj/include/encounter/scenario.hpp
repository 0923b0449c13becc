#pragma once

#include <string>
#include <vector>

#include "encounter/geometry.hpp"
#include "encounter/roadgraph.hpp"

namespace encounter::scenario {

struct OdometrySample {
  double t_s = 0.0;
  double v_mps = 0.0;       // translational velocity
  double omega_radps = 0.0;  // rotational velocity
};

/// One camera detection: offset of the pedestrian in the robot frame
/// (x forward along heading, y left).
struct Detection {
  double t_s = 0.0;
  geometry::LocalPoint offset;
};

struct DetectionTrack {
  std::string track_id;
  std::vector<Detection> detections;  // >= 2, strictly increasing timestamps
};

/// One recorded mission, already projected into its local tangent frame.
struct MissionLog {
  std::string mission_id;
  geometry::GeoPoint origin;  // anchor of the local frame
  geometry::Trajectory robot_poses;  // headings present on every sample
  std::vector<OdometrySample> odometry;
  std::vector<DetectionTrack> tracks;
};

/// Paired robot/pedestrian trajectories over one detection track's window.
struct InteractionScenario {
  std::string scenario_id;
  std::string mission_id;
  std::string track_id;
  double t_first_s = 0.0;
  double t_last_s = 0.0;
  geometry::Trajectory robot_traj;
  geometry::Trajectory ped_traj;
  geometry::DirectionFit robot_fit;
  geometry::DirectionFit ped_fit;
  double d_robot_m = 0.0;  // minimum robot-pedestrian distance over the window
};

struct SegmentationResult {
  std::vector<InteractionScenario> scenarios;        // ordered by first detection time
  std::vector<std::string> diagnostics;              // skipped tracks, dropped detections
};

/// Pedestrian trajectory in the mission-local frame: robot pose interpolated
/// at each detection time, detection offset rotated by the heading and
/// translated. Detections outside the robot pose span are dropped (reported
/// via diagnostics); fewer than 2 surviving points is a Degenerate error.
geometry::Trajectory build_pedestrian_trajectory(const MissionLog& mission,
                                                 const DetectionTrack& track,
                                                 std::vector<std::string>* diagnostics = nullptr);

/// One scenario per usable track: window from first to last surviving
/// detection, robot trajectory restricted to the window, direction fits and
/// d_robot computed. Unusable tracks are skipped and reported, not fatal.
SegmentationResult segment_scenarios(const MissionLog& mission);

struct RobotFeatures {
  double v_mean_mps = 0.0;
  double omega_mean_radps = 0.0;
};

/// Time-weighted means of |v| and |omega| (or signed omega) over the odometry
/// samples inside the scenario window, zero-order hold between samples.
/// Coverage below min_coverage of the window is a MissingData error.
RobotFeatures extract_robot_features(const InteractionScenario& scenario,
                                     const MissionLog& mission, double min_coverage = 0.5,
                                     bool absolute_omega = true);

struct PasserbyFeatures {
  double speed_mean_mps = 0.0;
  geometry::DirectionFit fit;
};

PasserbyFeatures extract_passerby_features(const InteractionScenario& scenario);

struct ContextFeatures {
  roadgraph::JunctionStats robot;
  roadgraph::JunctionStats ped;
};

ContextFeatures extract_context_features(const InteractionScenario& scenario,
                                         const roadgraph::JunctionIndex& index);

/// Which entity's Pearson coefficient the linearity filter applies to.
enum class FilterMode { Both, PedestrianOnly, RobotOnly };

const char* filter_mode_name(FilterMode mode);
FilterMode filter_mode_from_name(const std::string& name);

struct FilterResult {
  std::vector<InteractionScenario> kept;
  std::vector<InteractionScenario> removed;
};

/// Keep scenarios whose fits satisfy |r_p| > r_threshold (for the entities
/// selected by mode); scenarios with |r_p| <= r_threshold are removed.
FilterResult filter_linear(std::vector<InteractionScenario> scenarios,
                           double r_threshold = 0.5, FilterMode mode = FilterMode::Both);

/// The 10-dimensional context + interaction representation of one scenario.
/// Field order is the stable column contract of every export.
struct FeatureVector {
  double robot_jct_min_m = 0.0;
  double robot_jct_max_m = 0.0;
  double robot_jct_mean_m = 0.0;
  double ped_jct_min_m = 0.0;
  double ped_jct_max_m = 0.0;
  double ped_jct_mean_m = 0.0;
  double robot_v_mean_mps = 0.0;
  double robot_omega_mean_radps = 0.0;
  double ped_speed_mean_mps = 0.0;
  double alpha_rad = 0.0;  // encounter angle: 0 parallel, pi head-on

  static const std::vector<std::string>& column_names();
  std::vector<double> values() const;
};

FeatureVector assemble_vector(const InteractionScenario& scenario,
                              const RobotFeatures& robot_feats,
                              const PasserbyFeatures& ped_feats,
                              const ContextFeatures& ctx_feats);

struct ScatterRow {
  std::string scenario_id;
  double alpha_rad = 0.0;
  double d_robot_m = 0.0;
};

/// Encounter angle vs minimum distance, one row per scenario.
std::vector<ScatterRow> scatter_alpha_distance(const std::vector<InteractionScenario>& scenarios);

}  // namespace encounter::scenario
