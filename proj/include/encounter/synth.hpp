#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "encounter/geometry.hpp"
#include "encounter/mission_io.hpp"
#include "encounter/roadgraph.hpp"
#include "encounter/scenario.hpp"

namespace encounter::synth {

enum class EncounterKind { Parallel, Lateral, HeadOn };

const char* kind_name(EncounterKind kind);
EncounterKind kind_from_name(const std::string& name);

/// Parameters of one planted robot-pedestrian encounter. The pedestrian
/// moves at constant velocity so every planted value is analytically exact:
/// lateral_offset_m is the true closest-approach distance (reached exactly at
/// the mid-window sample), junction_distance_m the true minimum robot
/// distance to the junction node.
struct EncounterSpec {
  EncounterKind kind = EncounterKind::Parallel;
  double robot_speed_mps = 1.2;
  double ped_speed_mps = 1.5;
  double lateral_offset_m = 2.0;
  double junction_distance_m = 25.0;
  double noise_sigma_m = 0.0;
  double duration_s = 10.0;
  double sample_rate_hz = 4.0;
  std::uint64_t seed = 0;
};

/// One encounter in its local frame (robot path along +x, centered on the
/// origin, time starting at 0).
struct GeneratedEncounter {
  EncounterKind kind = EncounterKind::Parallel;
  std::vector<geometry::TimedPose> robot_poses;
  std::vector<scenario::OdometrySample> odometry;
  scenario::DetectionTrack track;             // track_id left empty
  geometry::LocalPoint junction_position;     // planted junction node
};

GeneratedEncounter generate_encounter(const EncounterSpec& spec);

struct SynthParams {
  int n_per_kind = 10;
  double junction_fraction = 0.5;
  double noise_sigma_m = 0.0;
  std::uint64_t seed = 1;

  double robot_speed_mps = 1.2;
  double ped_speed_mps = 1.5;
  double duration_s = 10.0;
  double sample_rate_hz = 4.0;

  // Planted closest-approach distance per kind, drawn N(mean, sigma).
  double offset_mean_parallel_m = 0.5;
  double offset_mean_head_on_m = 1.5;
  double offset_mean_lateral_m = 3.0;
  double offset_sigma_m = 0.2;

  // Junction placement: scenarios flagged junction-true get the near value.
  double junction_near_m = 3.0;
  double junction_far_m = 25.0;

  geometry::GeoPoint origin{50.0, 13.0};
  std::string mission_id = "synth";
};

struct TruthRecord {
  std::string scenario_id;
  EncounterKind kind = EncounterKind::Parallel;
  bool is_junction = false;
};

struct SynthDataset {
  mission_io::MissionDocument mission;
  roadgraph::RoadGraph graph;
  std::vector<TruthRecord> ground_truth;
};

/// Balanced encounters of all three kinds spread over a spatial grid, one
/// detection track per encounter, cross-shaped road graph per encounter.
/// Exactly round(junction_fraction * total) scenarios are placed at the near
/// junction distance. Byte-identical output for a fixed seed.
SynthDataset generate_dataset(const SynthParams& params);

std::string ground_truth_to_csv(const std::vector<TruthRecord>& records);
std::vector<TruthRecord> ground_truth_from_csv(const std::string& text,
                                               const std::string& source_name = "<string>");

}  // namespace encounter::synth
