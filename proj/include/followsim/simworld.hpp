#pragma once

// Kinematic world: bicycle-model vehicle, target trajectories, per-tick
// trace records and episode metrics.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "followsim/camera.hpp"
#include "followsim/detection.hpp"
#include "followsim/geometry.hpp"
#include "followsim/navigation.hpp"
#include "followsim/servo.hpp"

namespace followsim {

struct VehicleParams {
  double wheelbase_m = 0.16;
  double max_steer_rad = deg_to_rad(30.0);
  double max_speed_mps = 1.5;

  void validate() const {
    if (!(wheelbase_m > 0.0))
      throw std::invalid_argument("vehicle: wheelbase_m must be positive");
    if (!(max_steer_rad > 0.0 && max_steer_rad < std::numbers::pi / 2.0))
      throw std::invalid_argument("vehicle: max_steer_rad must be in (0, pi/2)");
    if (!(max_speed_mps > 0.0))
      throw std::invalid_argument("vehicle: max_speed_mps must be positive");
  }
};

// Advance the bicycle model by dt at constant steering angle and speed,
// integrating the exact circular arc. steer_rad > 0 turns counterclockwise
// (heading increases); speed < 0 reverses, which also reverses the swing of
// the nose. Below the tan threshold the motion is a straight segment.
inline Pose step_kinematics(const Pose& pose, double steer_rad, double speed,
                            const VehicleParams& vp, double dt) {
  vp.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("step_kinematics: dt must be > 0");
  if (!(std::abs(steer_rad) <= vp.max_steer_rad + 1e-12))
    throw std::invalid_argument("step_kinematics: steering beyond max_steer_rad");
  if (!(std::abs(speed) <= vp.max_speed_mps + 1e-12))
    throw std::invalid_argument("step_kinematics: speed beyond max_speed_mps");

  Pose out = pose;
  const double t = std::tan(steer_rad);
  if (std::abs(t) <= 1e-9) {
    out.x += speed * dt * std::cos(pose.heading);
    out.y += speed * dt * std::sin(pose.heading);
    return out;
  }
  const double radius = vp.wheelbase_m / t;
  const double dpsi = speed * dt / radius;
  out.x += radius * (std::sin(pose.heading + dpsi) - std::sin(pose.heading));
  out.y -= radius * (std::cos(pose.heading + dpsi) - std::cos(pose.heading));
  out.heading = normalize_angle(pose.heading + dpsi);
  return out;
}

enum class TrajectoryKind { STATIONARY, WAYPOINTS, PARAMETRIC };
enum class CurveKind { LINE, CIRCLE };

struct Waypoint {
  double t = 0.0;
  Vec2 p;
};

struct ParametricCurve {
  CurveKind curve = CurveKind::LINE;
  // LINE: p(t) = start + t * velocity
  Vec2 start;
  Vec2 velocity;
  // CIRCLE: p(t) = center + radius * (cos, sin)(angular_speed * t + phase)
  Vec2 center;
  double radius_m = 1.0;
  double angular_speed_rad_s = 0.0;
  double phase_rad = 0.0;
};

struct TargetTrajectory {
  TrajectoryKind kind = TrajectoryKind::STATIONARY;
  Vec2 point{2.0, 0.0};           // STATIONARY
  std::vector<Waypoint> waypoints;  // WAYPOINTS, strictly increasing times
  ParametricCurve param;            // PARAMETRIC

  void validate() const {
    if (kind == TrajectoryKind::WAYPOINTS) {
      if (waypoints.empty())
        throw std::invalid_argument("trajectory: waypoint list is empty");
      for (std::size_t i = 1; i < waypoints.size(); ++i)
        if (!(waypoints[i].t > waypoints[i - 1].t))
          throw std::invalid_argument(
              "trajectory: waypoint times must be strictly increasing");
    }
    if (kind == TrajectoryKind::PARAMETRIC &&
        param.curve == CurveKind::CIRCLE && !(param.radius_m > 0.0))
      throw std::invalid_argument("trajectory: circle radius must be positive");
  }
};

// Target position at simulation time t. Waypoint trajectories interpolate
// linearly and clamp at both ends.
inline Vec2 target_position(const TargetTrajectory& traj, double t) {
  switch (traj.kind) {
    case TrajectoryKind::STATIONARY:
      return traj.point;
    case TrajectoryKind::WAYPOINTS: {
      const auto& wp = traj.waypoints;
      if (wp.empty())
        throw std::invalid_argument("trajectory: waypoint list is empty");
      if (t <= wp.front().t) return wp.front().p;
      if (t >= wp.back().t) return wp.back().p;
      for (std::size_t i = 1; i < wp.size(); ++i) {
        if (t <= wp[i].t) {
          const double f = (t - wp[i - 1].t) / (wp[i].t - wp[i - 1].t);
          return wp[i - 1].p + f * (wp[i].p - wp[i - 1].p);
        }
      }
      return wp.back().p;
    }
    case TrajectoryKind::PARAMETRIC:
      if (traj.param.curve == CurveKind::LINE)
        return traj.param.start + t * traj.param.velocity;
      return traj.param.center +
             Vec2{traj.param.radius_m *
                      std::cos(traj.param.angular_speed_rad_s * t +
                               traj.param.phase_rad),
                  traj.param.radius_m *
                      std::sin(traj.param.angular_speed_rad_s * t +
                               traj.param.phase_rad)};
  }
  return traj.point;
}

// One record per control tick. delta, case_id, action and servo are the
// values in effect at the end of the tick interval (a result that becomes
// ready mid-interval shows up in its tick). detection and inference_s are
// set only on ticks in which a detector pass completed; a completed pass
// that found nothing leaves detection empty but still reports inference_s.
struct TraceRecord {
  std::uint64_t tick = 0;
  double t = 0.0;
  Pose follower;
  Vec2 target;
  std::optional<BoundingBox> truth_box;
  std::optional<Detection> detection;
  DetectionDelta delta;
  int case_id = 5;
  ActionCommand action;
  ServoSetting servo;
  std::optional<double> inference_s;
};

struct Metrics {
  std::size_t ticks = 0;
  double in_fov_fraction = 0.0;
  // Over records whose delta is marked detected; empty when the target was
  // never acquired. Undetected stretches report an exact zero delta by
  // contract, which would read as perfect tracking, so they are excluded.
  std::optional<double> mean_abs_dx;
  std::optional<double> mean_abs_dy;
  std::optional<double> max_abs_dx;
  std::optional<double> max_abs_dy;
  // Start time of the final case-5 run, when that run reaches the end of the
  // episode and lasts at least 2 s (or spans the whole trace). Meaningful
  // for stationary targets.
  std::optional<double> time_to_converge_s;
  double final_standoff_m = 0.0;
  std::size_t case_transitions = 0;
};

inline Metrics compute_metrics(const std::vector<TraceRecord>& trace) {
  if (trace.empty())
    throw std::invalid_argument("compute_metrics: empty trace");
  Metrics m;
  m.ticks = trace.size();

  std::size_t in_fov = 0;
  for (const auto& r : trace)
    if (r.truth_box) ++in_fov;
  m.in_fov_fraction = static_cast<double>(in_fov) / static_cast<double>(m.ticks);

  double sum_dx = 0.0, sum_dy = 0.0, max_dx = 0.0, max_dy = 0.0;
  std::size_t n = 0;
  for (const auto& r : trace) {
    if (!r.delta.detected) continue;
    const double adx = std::abs(r.delta.dx);
    const double ady = std::abs(r.delta.dy);
    sum_dx += adx;
    sum_dy += ady;
    max_dx = std::max(max_dx, adx);
    max_dy = std::max(max_dy, ady);
    ++n;
  }
  if (n > 0) {
    m.mean_abs_dx = sum_dx / static_cast<double>(n);
    m.mean_abs_dy = sum_dy / static_cast<double>(n);
    m.max_abs_dx = max_dx;
    m.max_abs_dy = max_dy;
  }

  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i].case_id != trace[i - 1].case_id) ++m.case_transitions;

  // Final maximal case-5 run.
  if (trace.back().case_id == 5) {
    std::size_t start = trace.size() - 1;
    while (start > 0 && trace[start - 1].case_id == 5) --start;
    const double run_span = trace.back().t - trace[start].t;
    if (start == 0 || run_span >= 2.0) m.time_to_converge_s = trace[start].t;
  }

  m.final_standoff_m =
      distance(position(trace.back().follower), trace.back().target);
  return m;
}

}  // namespace followsim
