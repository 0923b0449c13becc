#include "encounter/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace encounter::geometry {

namespace {

constexpr double kVarianceFloor = 1e-12;  // m^2; below this an axis is constant

double lerp(double a, double b, double u) { return a + (b - a) * u; }

}  // namespace

double wrap_angle(double rad) {
  double x = std::fmod(rad + kPi, 2.0 * kPi);
  if (x <= 0.0) x += 2.0 * kPi;
  return x - kPi;
}

bool geo_valid(const GeoPoint& p) {
  return std::isfinite(p.lat_deg) && std::isfinite(p.lon_deg) &&
         p.lat_deg >= -90.0 && p.lat_deg <= 90.0 &&
         p.lon_deg >= -180.0 && p.lon_deg <= 180.0;
}

Trajectory::Trajectory(std::vector<TimedPose> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 2)
    raise(ErrorCode::InvalidArgument, "trajectory needs at least 2 samples");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const TimedPose& s = samples_[i];
    if (!std::isfinite(s.t_s) || !std::isfinite(s.position.x_m) || !std::isfinite(s.position.y_m))
      raise(ErrorCode::InvalidArgument, "trajectory sample has non-finite values");
    if (s.heading_rad && !(std::fabs(*s.heading_rad) <= kPi))
      raise(ErrorCode::InvalidArgument, "trajectory heading outside [-pi, pi]");
    if (i > 0 && !(s.t_s > samples_[i - 1].t_s))
      raise(ErrorCode::InvalidArgument, "trajectory timestamps must be strictly increasing");
  }
}

TimedPose Trajectory::pose_at(double t) const {
  if (t < start_time() || t > end_time()) {
    std::ostringstream os;
    os << "time " << t << " outside trajectory span [" << start_time() << ", " << end_time() << "]";
    raise(ErrorCode::OutOfRange, os.str());
  }
  auto it = std::lower_bound(samples_.begin(), samples_.end(), t,
                             [](const TimedPose& s, double v) { return s.t_s < v; });
  if (it != samples_.end() && it->t_s == t) return *it;
  const TimedPose& hi = *it;
  const TimedPose& lo = *(it - 1);
  double u = (t - lo.t_s) / (hi.t_s - lo.t_s);
  TimedPose out;
  out.t_s = t;
  out.position = {lerp(lo.position.x_m, hi.position.x_m, u),
                  lerp(lo.position.y_m, hi.position.y_m, u)};
  if (lo.heading_rad && hi.heading_rad) {
    double delta = wrap_angle(*hi.heading_rad - *lo.heading_rad);
    out.heading_rad = wrap_angle(*lo.heading_rad + u * delta);
  }
  return out;
}

LocalPoint project_to_local(const GeoPoint& origin, const GeoPoint& p) {
  if (!geo_valid(origin) || !geo_valid(p))
    raise(ErrorCode::InvalidArgument, "coordinates outside WGS84 bounds");
  if (std::fabs(p.lat_deg - origin.lat_deg) >= 1.0)
    raise(ErrorCode::InvalidArgument, "point too far from projection origin (city-scale frame)");
  double dlat = deg_to_rad(p.lat_deg - origin.lat_deg);
  double dlon = deg_to_rad(p.lon_deg - origin.lon_deg);
  return {kEarthRadiusM * std::cos(deg_to_rad(origin.lat_deg)) * dlon, kEarthRadiusM * dlat};
}

GeoPoint local_to_geo(const GeoPoint& origin, const LocalPoint& p) {
  if (!geo_valid(origin))
    raise(ErrorCode::InvalidArgument, "coordinates outside WGS84 bounds");
  double lat = origin.lat_deg + rad_to_deg(p.y_m / kEarthRadiusM);
  double lon = origin.lon_deg +
               rad_to_deg(p.x_m / (kEarthRadiusM * std::cos(deg_to_rad(origin.lat_deg))));
  return {lat, lon};
}

LocalPoint relative_to_global(const TimedPose& robot_pose, const LocalPoint& offset) {
  if (!robot_pose.heading_rad)
    raise(ErrorCode::InvalidArgument, "robot pose without heading");
  double c = std::cos(*robot_pose.heading_rad);
  double s = std::sin(*robot_pose.heading_rad);
  return {robot_pose.position.x_m + c * offset.x_m - s * offset.y_m,
          robot_pose.position.y_m + s * offset.x_m + c * offset.y_m};
}

DirectionFit fit_direction(const Trajectory& traj) {
  const auto& pts = traj.samples();
  const double n = static_cast<double>(pts.size());

  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p.position.x_m;
    my += p.position.y_m;
  }
  mx /= n;
  my /= n;

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    double dx = p.position.x_m - mx;
    double dy = p.position.y_m - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }

  if (sxx / n < kVarianceFloor && syy / n < kVarianceFloor)
    raise(ErrorCode::Degenerate, "all trajectory positions identical");

  double dispx = pts.back().position.x_m - pts.front().position.x_m;
  double dispy = pts.back().position.y_m - pts.front().position.y_m;
  if (dispx == 0.0 && dispy == 0.0)
    raise(ErrorCode::Degenerate, "zero net displacement; direction sign undefined");

  // Principal axis of the position covariance (total least squares). Safe for
  // vertical paths, unlike y-on-x regression.
  double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  std::array<double, 2> dir{std::cos(theta), std::sin(theta)};
  if (dir[0] * dispx + dir[1] * dispy < 0.0) {
    dir[0] = -dir[0];
    dir[1] = -dir[1];
  }

  // Coordinate Pearson correlation; a numerically constant axis means exact
  // axis-aligned motion, which the linearity filter must treat as linear.
  double pearson;
  if (sxx / n < kVarianceFloor || syy / n < kVarianceFloor)
    pearson = 1.0;
  else
    pearson = sxy / std::sqrt(sxx * syy);

  return {dir, pearson, LocalPoint{mx, my}};
}

double angle_between(const DirectionFit& a, const DirectionFit& b) {
  double dot = a.direction[0] * b.direction[0] + a.direction[1] * b.direction[1];
  return std::acos(std::clamp(dot, -1.0, 1.0));
}

double mean_speed(const Trajectory& traj) {
  double dur = traj.duration();
  if (!(dur > 0.0)) raise(ErrorCode::Degenerate, "trajectory has zero duration");
  double length = 0.0;
  const auto& pts = traj.samples();
  for (std::size_t i = 1; i < pts.size(); ++i)
    length += distance(pts[i - 1].position, pts[i].position);
  return length / dur;
}

Trajectory resample(const Trajectory& traj, const std::vector<double>& timestamps) {
  for (std::size_t i = 1; i < timestamps.size(); ++i)
    if (!(timestamps[i] > timestamps[i - 1]))
      raise(ErrorCode::InvalidArgument, "resample timestamps must be strictly increasing");
  std::vector<TimedPose> out;
  out.reserve(timestamps.size());
  for (double t : timestamps) out.push_back(traj.pose_at(t));
  return Trajectory(std::move(out));
}

double min_distance(const Trajectory& a, const Trajectory& b) {
  double t0 = std::max(a.start_time(), b.start_time());
  double t1 = std::min(a.end_time(), b.end_time());
  if (t0 > t1) raise(ErrorCode::NoOverlap, "trajectories do not overlap in time");

  std::vector<double> times;
  times.reserve(a.size() + b.size() + 2);
  times.push_back(t0);
  times.push_back(t1);
  for (const auto& s : a.samples())
    if (s.t_s >= t0 && s.t_s <= t1) times.push_back(s.t_s);
  for (const auto& s : b.samples())
    if (s.t_s >= t0 && s.t_s <= t1) times.push_back(s.t_s);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  double best = std::numeric_limits<double>::infinity();
  for (double t : times)
    best = std::min(best, distance(a.pose_at(t).position, b.pose_at(t).position));
  return best;
}

}  // namespace encounter::geometry
