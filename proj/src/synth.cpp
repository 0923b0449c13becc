#include "encounter/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "encounter/rng.hpp"

namespace encounter::synth {

namespace geo = encounter::geometry;

const char* kind_name(EncounterKind kind) {
  switch (kind) {
    case EncounterKind::Parallel: return "parallel";
    case EncounterKind::Lateral: return "lateral";
    case EncounterKind::HeadOn: return "head_on";
  }
  return "parallel";
}

EncounterKind kind_from_name(const std::string& name) {
  if (name == "parallel") return EncounterKind::Parallel;
  if (name == "lateral") return EncounterKind::Lateral;
  if (name == "head_on") return EncounterKind::HeadOn;
  raise(ErrorCode::InvalidArgument, "unknown encounter kind: " + name);
}

namespace {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

Vec2 ped_velocity(EncounterKind kind, double speed) {
  switch (kind) {
    case EncounterKind::Parallel: return {speed, 0.0};   // true angle 0
    case EncounterKind::HeadOn: return {-speed, 0.0};    // true angle pi
    case EncounterKind::Lateral: return {0.0, speed};    // true angle pi/2
  }
  return {speed, 0.0};
}

void validate_spec(const EncounterSpec& spec) {
  if (spec.robot_speed_mps < 0.0 || spec.ped_speed_mps < 0.0)
    raise(ErrorCode::InvalidArgument, "speeds must be non-negative");
  if (!(spec.duration_s > 0.0)) raise(ErrorCode::InvalidArgument, "duration must be positive");
  if (!(spec.sample_rate_hz > 0.0))
    raise(ErrorCode::InvalidArgument, "sample rate must be positive");
  if (spec.noise_sigma_m < 0.0) raise(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
  if (!(spec.lateral_offset_m > 0.0))
    raise(ErrorCode::InvalidArgument, "lateral offset must be positive");
}

}  // namespace

GeneratedEncounter generate_encounter(const EncounterSpec& spec) {
  validate_spec(spec);

  const double t_mid = spec.duration_s / 2.0;
  const Vec2 v_robot{spec.robot_speed_mps, 0.0};
  const Vec2 v_ped = ped_velocity(spec.kind, spec.ped_speed_mps);

  // Place the pedestrian so that at mid-window the separation vector is
  // perpendicular to the relative velocity: the planted offset is then the
  // exact minimum distance, reached exactly at the mid-window sample.
  Vec2 v_rel{v_ped.x - v_robot.x, v_ped.y - v_robot.y};
  double rel_norm = std::hypot(v_rel.x, v_rel.y);
  Vec2 unit_sep{0.0, 1.0};
  if (rel_norm > 1e-12) {
    unit_sep = {-v_rel.y / rel_norm, v_rel.x / rel_norm};
    if (unit_sep.y < 0.0) unit_sep = {-unit_sep.x, -unit_sep.y};
  }
  const Vec2 ped_mid{spec.lateral_offset_m * unit_sep.x, spec.lateral_offset_m * unit_sep.y};

  Rng rng(spec.seed);
  const auto n_steps = static_cast<int>(std::llround(spec.duration_s * spec.sample_rate_hz));

  GeneratedEncounter out;
  out.kind = spec.kind;
  out.junction_position = {0.0, -spec.junction_distance_m};
  for (int i = 0; i <= n_steps; ++i) {
    double t = static_cast<double>(i) / spec.sample_rate_hz;
    double dt = t - t_mid;

    geo::LocalPoint robot{v_robot.x * dt + rng.normal(0.0, spec.noise_sigma_m),
                          v_robot.y * dt + rng.normal(0.0, spec.noise_sigma_m)};
    geo::LocalPoint ped{ped_mid.x + v_ped.x * dt + rng.normal(0.0, spec.noise_sigma_m),
                        ped_mid.y + v_ped.y * dt + rng.normal(0.0, spec.noise_sigma_m)};

    const double heading = 0.0;  // robot moves along +x
    out.robot_poses.push_back({t, robot, heading});
    out.odometry.push_back({t, spec.robot_speed_mps, 0.0});

    // Detection offset in the robot frame: rotate the separation by -heading.
    double dx = ped.x_m - robot.x_m;
    double dy = ped.y_m - robot.y_m;
    double c = std::cos(heading), s = std::sin(heading);
    out.track.detections.push_back({t, {c * dx + s * dy, -s * dx + c * dy}});
  }
  return out;
}

SynthDataset generate_dataset(const SynthParams& params) {
  if (params.n_per_kind < 1) raise(ErrorCode::InvalidArgument, "n_per_kind must be >= 1");
  if (params.junction_fraction < 0.0 || params.junction_fraction > 1.0)
    raise(ErrorCode::InvalidArgument, "junction_fraction must lie in [0, 1]");

  const int total = 3 * params.n_per_kind;
  const auto n_junction =
      static_cast<int>(std::llround(params.junction_fraction * static_cast<double>(total)));

  // Kinds interleave so the junction flag is balanced across kinds.
  static constexpr EncounterKind kKinds[3] = {EncounterKind::Parallel, EncounterKind::HeadOn,
                                              EncounterKind::Lateral};

  const double cell_m = 500.0;  // grid spacing; keeps each encounter's junction nearest
  const auto grid_w = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(total))));
  const double time_step = params.duration_s + 5.0;

  Rng offset_rng(derive_seed(params.seed, 0x0ff5e7));

  SynthDataset ds;
  ds.mission.mission_id = params.mission_id;
  ds.mission.origin = params.origin;

  for (int i = 0; i < total; ++i) {
    EncounterKind kind = kKinds[i % 3];
    bool near_junction = i < n_junction;

    EncounterSpec spec;
    spec.kind = kind;
    spec.robot_speed_mps = params.robot_speed_mps;
    spec.ped_speed_mps = params.ped_speed_mps;
    spec.duration_s = params.duration_s;
    spec.sample_rate_hz = params.sample_rate_hz;
    spec.noise_sigma_m = params.noise_sigma_m;
    spec.junction_distance_m = near_junction ? params.junction_near_m : params.junction_far_m;
    spec.seed = derive_seed(params.seed, static_cast<std::uint64_t>(i), 1);

    double mean = params.offset_mean_parallel_m;
    if (kind == EncounterKind::HeadOn) mean = params.offset_mean_head_on_m;
    if (kind == EncounterKind::Lateral) mean = params.offset_mean_lateral_m;
    spec.lateral_offset_m = std::max(0.05, offset_rng.normal(mean, params.offset_sigma_m));

    GeneratedEncounter enc = generate_encounter(spec);

    double shift_x = static_cast<double>(i % grid_w) * cell_m;
    double shift_y = static_cast<double>(i / grid_w) * cell_m;
    double shift_t = static_cast<double>(i) * time_step;

    std::ostringstream id;
    id << "trk" << std::setw(4) << std::setfill('0') << i;
    std::string track_id = id.str();

    for (const auto& pose : enc.robot_poses)
      ds.mission.robot_poses.push_back(
          {pose.t_s + shift_t,
           geo::local_to_geo(params.origin, {pose.position.x_m + shift_x,
                                             pose.position.y_m + shift_y}),
           *pose.heading_rad});
    for (const auto& odo : enc.odometry)
      ds.mission.odometry.push_back({odo.t_s + shift_t, odo.v_mps, odo.omega_radps});

    scenario::DetectionTrack track;
    track.track_id = track_id;
    for (const auto& det : enc.track.detections)
      track.detections.push_back({det.t_s + shift_t, det.offset});
    ds.mission.tracks.push_back(std::move(track));

    // Cross-shaped road fragment: the centre (degree 4) is the only junction.
    geo::LocalPoint jct{enc.junction_position.x_m + shift_x,
                        enc.junction_position.y_m + shift_y};
    std::string base = "j" + std::to_string(i);
    const double arm = 50.0;
    ds.graph.nodes.push_back({base, geo::local_to_geo(params.origin, jct), false, 0});
    const std::pair<const char*, geo::LocalPoint> arms[4] = {
        {"_n", {jct.x_m, jct.y_m + arm}},
        {"_s", {jct.x_m, jct.y_m - arm}},
        {"_e", {jct.x_m + arm, jct.y_m}},
        {"_w", {jct.x_m - arm, jct.y_m}},
    };
    for (const auto& [suffix, pos] : arms) {
      ds.graph.nodes.push_back({base + suffix, geo::local_to_geo(params.origin, pos), false, 0});
      ds.graph.edges.push_back({base, base + suffix});
    }

    ds.ground_truth.push_back({params.mission_id + ":" + track_id, kind, near_junction});
  }

  // Degrees are normally assigned by the parser; fill them for direct use.
  for (auto& node : ds.graph.nodes) node.degree = 0;
  for (std::size_t e = 0; e < ds.graph.edges.size(); ++e) {
    for (auto& node : ds.graph.nodes) {
      if (node.id == ds.graph.edges[e].from_id || node.id == ds.graph.edges[e].to_id)
        node.degree += 1;
    }
  }

  return ds;
}

std::string ground_truth_to_csv(const std::vector<TruthRecord>& records) {
  mission_io::CsvWriter csv({"scenario_id", "kind", "is_junction"});
  for (const auto& r : records)
    csv.add_row({r.scenario_id, kind_name(r.kind), r.is_junction ? "1" : "0"});
  return csv.str();
}

std::vector<TruthRecord> ground_truth_from_csv(const std::string& text,
                                               const std::string& source_name) {
  mission_io::CsvTable table = mission_io::parse_csv(text, source_name);
  std::size_t id_col = table.column("scenario_id", source_name);
  std::size_t kind_col = table.column("kind", source_name);
  std::size_t jct_col = table.column("is_junction", source_name);

  std::vector<TruthRecord> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows)
    out.push_back({row[id_col], kind_from_name(row[kind_col]), row[jct_col] == "1"});
  return out;
}

}  // namespace encounter::synth
