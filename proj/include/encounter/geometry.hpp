#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "encounter/errors.hpp"

namespace encounter::geometry {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

/// Normalize an angle to (-pi, pi].
double wrap_angle(double rad);

/// WGS84 position in degrees.
struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

bool geo_valid(const GeoPoint& p);

/// Position in a local tangent plane: x meters east, y meters north of the origin.
struct LocalPoint {
  double x_m = 0.0;
  double y_m = 0.0;
};

inline double distance(const LocalPoint& a, const LocalPoint& b) {
  double dx = a.x_m - b.x_m;
  double dy = a.y_m - b.y_m;
  return std::sqrt(dx * dx + dy * dy);
}

struct TimedPose {
  double t_s = 0.0;
  LocalPoint position;
  std::optional<double> heading_rad;  // [-pi, pi]; present for robot poses
};

/// Timestamped 2D path of one entity. At least two samples, strictly
/// increasing timestamps; enforced at construction.
class Trajectory {
 public:
  explicit Trajectory(std::vector<TimedPose> samples);

  const std::vector<TimedPose>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const TimedPose& front() const { return samples_.front(); }
  const TimedPose& back() const { return samples_.back(); }
  double start_time() const { return samples_.front().t_s; }
  double end_time() const { return samples_.back().t_s; }
  double duration() const { return end_time() - start_time(); }

  /// Pose at time t by linear interpolation of position and shortest-arc
  /// interpolation of heading (heading present only when both neighbouring
  /// samples carry one). t outside the span is an OutOfRange error.
  TimedPose pose_at(double t) const;

 private:
  std::vector<TimedPose> samples_;
};

/// Total-least-squares movement direction of a trajectory.
/// `direction` is a unit vector oriented along the first-to-last displacement;
/// `pearson_r` is the sample Pearson correlation of the x and y coordinates,
/// defined as 1 when one coordinate is (numerically) constant, since exact
/// axis-aligned motion is perfectly linear.
struct DirectionFit {
  std::array<double, 2> direction{1.0, 0.0};
  double pearson_r = 0.0;
  LocalPoint origin;  // centroid of the fitted points
};

/// Equirectangular tangent-plane projection anchored at `origin`:
///   x = R * cos(origin.lat) * dlon, y = R * dlat  (angles in radians).
/// Valid at city scale; |p.lat - origin.lat| must stay below 1 degree.
LocalPoint project_to_local(const GeoPoint& origin, const GeoPoint& p);

/// Inverse of project_to_local for the same origin.
GeoPoint local_to_geo(const GeoPoint& origin, const LocalPoint& p);

/// Rotate a robot-frame offset (x forward, y left) by the pose heading and
/// translate by the pose position.
LocalPoint relative_to_global(const TimedPose& robot_pose, const LocalPoint& offset);

DirectionFit fit_direction(const Trajectory& traj);

/// Angle between two fitted directions, in [0, pi]. 0 = parallel movement,
/// pi = head-on movement.
double angle_between(const DirectionFit& a, const DirectionFit& b);

/// Path length divided by duration.
double mean_speed(const Trajectory& traj);

/// Trajectory evaluated at the given strictly increasing timestamps, all of
/// which must lie within the source span (no extrapolation).
Trajectory resample(const Trajectory& traj, const std::vector<double>& timestamps);

/// Minimum Euclidean distance between two trajectories over their temporal
/// overlap, both interpolated onto the union of sample times.
double min_distance(const Trajectory& a, const Trajectory& b);

}  // namespace encounter::geometry
