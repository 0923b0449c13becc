#include "encounter/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace encounter::scenario {

namespace geo = encounter::geometry;

geo::Trajectory build_pedestrian_trajectory(const MissionLog& mission,
                                            const DetectionTrack& track,
                                            std::vector<std::string>* diagnostics) {
  const double span_start = mission.robot_poses.start_time();
  const double span_end = mission.robot_poses.end_time();

  std::vector<geo::TimedPose> points;
  points.reserve(track.detections.size());
  std::size_t dropped = 0;
  for (const auto& det : track.detections) {
    if (det.t_s < span_start || det.t_s > span_end) {
      ++dropped;
      continue;
    }
    geo::TimedPose robot = mission.robot_poses.pose_at(det.t_s);
    points.push_back({det.t_s, geo::relative_to_global(robot, det.offset), std::nullopt});
  }
  if (dropped > 0 && diagnostics) {
    std::ostringstream os;
    os << "track " << track.track_id << ": dropped " << dropped
       << " detection(s) outside robot pose coverage";
    diagnostics->push_back(os.str());
  }
  if (points.size() < 2)
    raise(ErrorCode::Degenerate,
          "track " + track.track_id + ": fewer than 2 detections inside robot pose coverage");
  return geo::Trajectory(std::move(points));
}

namespace {

/// Robot trajectory cut to [t0, t1]: interpolated endpoint poses plus every
/// raw sample strictly inside the window.
geo::Trajectory restrict_to_window(const geo::Trajectory& traj, double t0, double t1) {
  std::vector<geo::TimedPose> out;
  out.push_back(traj.pose_at(t0));
  for (const auto& s : traj.samples())
    if (s.t_s > t0 && s.t_s < t1) out.push_back(s);
  out.push_back(traj.pose_at(t1));
  return geo::Trajectory(std::move(out));
}

}  // namespace

SegmentationResult segment_scenarios(const MissionLog& mission) {
  SegmentationResult result;

  for (const auto& track : mission.tracks) {
    try {
      geo::Trajectory ped = build_pedestrian_trajectory(mission, track, &result.diagnostics);
      double t0 = ped.start_time();
      double t1 = ped.end_time();

      InteractionScenario sc{
          mission.mission_id + ":" + track.track_id,
          mission.mission_id,
          track.track_id,
          t0,
          t1,
          restrict_to_window(mission.robot_poses, t0, t1),
          std::move(ped),
          {},
          {},
          0.0,
      };
      sc.robot_fit = geo::fit_direction(sc.robot_traj);
      sc.ped_fit = geo::fit_direction(sc.ped_traj);
      sc.d_robot_m = geo::min_distance(sc.robot_traj, sc.ped_traj);
      result.scenarios.push_back(std::move(sc));
    } catch (const Error& e) {
      result.diagnostics.push_back("track " + track.track_id + " skipped: " + e.what());
    }
  }

  std::stable_sort(result.scenarios.begin(), result.scenarios.end(),
                   [](const InteractionScenario& a, const InteractionScenario& b) {
                     if (a.t_first_s != b.t_first_s) return a.t_first_s < b.t_first_s;
                     return a.track_id < b.track_id;
                   });
  return result;
}

RobotFeatures extract_robot_features(const InteractionScenario& scenario,
                                     const MissionLog& mission, double min_coverage,
                                     bool absolute_omega) {
  const double w0 = scenario.t_first_s;
  const double w1 = scenario.t_last_s;
  const double window = w1 - w0;
  const auto& odo = mission.odometry;

  if (odo.size() < 2)
    raise(ErrorCode::MissingData,
          scenario.scenario_id + ": no odometry coverage inside scenario window");

  double v_integral = 0.0, omega_integral = 0.0, covered = 0.0;
  for (std::size_t i = 0; i + 1 < odo.size(); ++i) {
    double seg0 = std::max(odo[i].t_s, w0);
    double seg1 = std::min(odo[i + 1].t_s, w1);
    if (seg1 <= seg0) continue;
    double dt = seg1 - seg0;
    covered += dt;
    v_integral += std::fabs(odo[i].v_mps) * dt;
    double om = odo[i].omega_radps;
    omega_integral += (absolute_omega ? std::fabs(om) : om) * dt;
  }

  if (!(window > 0.0) || covered / window < min_coverage) {
    std::ostringstream os;
    os << scenario.scenario_id << ": odometry covers " << covered << " s of a " << window
       << " s window (need " << min_coverage * 100.0 << "%)";
    raise(ErrorCode::MissingData, os.str());
  }

  return {v_integral / covered, omega_integral / covered};
}

PasserbyFeatures extract_passerby_features(const InteractionScenario& scenario) {
  return {geo::mean_speed(scenario.ped_traj), scenario.ped_fit};
}

ContextFeatures extract_context_features(const InteractionScenario& scenario,
                                         const roadgraph::JunctionIndex& index) {
  return {roadgraph::junction_distance_stats(scenario.robot_traj, index),
          roadgraph::junction_distance_stats(scenario.ped_traj, index)};
}

const char* filter_mode_name(FilterMode mode) {
  switch (mode) {
    case FilterMode::Both: return "both";
    case FilterMode::PedestrianOnly: return "pedestrian";
    case FilterMode::RobotOnly: return "robot";
  }
  return "both";
}

FilterMode filter_mode_from_name(const std::string& name) {
  if (name == "both") return FilterMode::Both;
  if (name == "pedestrian") return FilterMode::PedestrianOnly;
  if (name == "robot") return FilterMode::RobotOnly;
  raise(ErrorCode::InvalidArgument, "unknown filter mode: " + name);
}

FilterResult filter_linear(std::vector<InteractionScenario> scenarios, double r_threshold,
                           FilterMode mode) {
  FilterResult result;
  for (auto& sc : scenarios) {
    bool robot_ok = std::fabs(sc.robot_fit.pearson_r) > r_threshold;
    bool ped_ok = std::fabs(sc.ped_fit.pearson_r) > r_threshold;
    bool keep = true;
    switch (mode) {
      case FilterMode::Both: keep = robot_ok && ped_ok; break;
      case FilterMode::PedestrianOnly: keep = ped_ok; break;
      case FilterMode::RobotOnly: keep = robot_ok; break;
    }
    (keep ? result.kept : result.removed).push_back(std::move(sc));
  }
  return result;
}

const std::vector<std::string>& FeatureVector::column_names() {
  static const std::vector<std::string> names = {
      "robot_jct_min_m",  "robot_jct_max_m",       "robot_jct_mean_m",
      "ped_jct_min_m",    "ped_jct_max_m",         "ped_jct_mean_m",
      "robot_v_mean_mps", "robot_omega_mean_radps", "ped_speed_mean_mps",
      "alpha_rad",
  };
  return names;
}

std::vector<double> FeatureVector::values() const {
  return {robot_jct_min_m,  robot_jct_max_m,        robot_jct_mean_m,
          ped_jct_min_m,    ped_jct_max_m,          ped_jct_mean_m,
          robot_v_mean_mps, robot_omega_mean_radps, ped_speed_mean_mps,
          alpha_rad};
}

FeatureVector assemble_vector(const InteractionScenario& scenario,
                              const RobotFeatures& robot_feats,
                              const PasserbyFeatures& ped_feats,
                              const ContextFeatures& ctx_feats) {
  FeatureVector v;
  v.robot_jct_min_m = ctx_feats.robot.min_m;
  v.robot_jct_max_m = ctx_feats.robot.max_m;
  v.robot_jct_mean_m = ctx_feats.robot.mean_m;
  v.ped_jct_min_m = ctx_feats.ped.min_m;
  v.ped_jct_max_m = ctx_feats.ped.max_m;
  v.ped_jct_mean_m = ctx_feats.ped.mean_m;
  v.robot_v_mean_mps = robot_feats.v_mean_mps;
  v.robot_omega_mean_radps = robot_feats.omega_mean_radps;
  v.ped_speed_mean_mps = ped_feats.speed_mean_mps;
  v.alpha_rad = geo::angle_between(scenario.robot_fit, scenario.ped_fit);
  return v;
}

std::vector<ScatterRow> scatter_alpha_distance(const std::vector<InteractionScenario>& scenarios) {
  std::vector<ScatterRow> rows;
  rows.reserve(scenarios.size());
  for (const auto& sc : scenarios)
    rows.push_back({sc.scenario_id, geo::angle_between(sc.robot_fit, sc.ped_fit), sc.d_robot_m});
  return rows;
}

}  // namespace encounter::scenario
