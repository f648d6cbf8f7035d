#pragma once

// Threshold calibration. Sweeps the target over a lateral-offset x distance
// grid with the vehicle held at its start pose, records the noise-free
// detection delta at each position, and derives bracket thresholds plus the
// image height of the box center at the desired standoff distance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "followsim/config.hpp"

namespace followsim {

struct CalibrationGrid {
  std::vector<double> lateral_offsets_m;  // positive = left of the heading
  std::vector<double> distances_m;
};

// Offsets of +-0.3 m around distances at 90%, 100% and 110% of the standoff.
inline CalibrationGrid default_grid(double standoff_m) {
  return CalibrationGrid{{-0.3, 0.0, 0.3},
                         {0.9 * standoff_m, standoff_m, 1.1 * standoff_m}};
}

struct GridSample {
  double distance_m = 0.0;
  double lateral_m = 0.0;
  bool visible = false;
  DetectionDelta delta;  // relative to (point_cx, calibrated point_cy)
};

struct CalibrationResult {
  BracketConfig brackets;
  double point_cy = 0.5;  // box-center height at the standoff distance
  std::vector<GridSample> samples;
  std::size_t skipped = 0;
  std::vector<std::string> notes;
};

inline CalibrationResult calibrate(const ScenarioConfig& cfg,
                                   const CalibrationGrid& grid) {
  if (grid.distances_m.empty() || grid.lateral_offsets_m.empty())
    throw ConfigError("calibrate: grid must have offsets and distances");
  const CameraIntrinsics cam = cfg.camera();
  cam.validate();
  cfg.shape.validate();
  const Pose pose = cfg.start_pose();
  const Vec2 fwd{std::cos(pose.heading), std::sin(pose.heading)};
  const Vec2 left{-std::sin(pose.heading), std::cos(pose.heading)};

  auto box_at = [&](double d, double s) {
    const Vec2 target = position(pose) + d * fwd + s * left;
    return project_target(pose, target, cfg.shape, cam);
  };

  const auto standoff_box = box_at(cfg.standoff_m, 0.0);
  if (!standoff_box)
    throw ConfigError(
        "calibrate: target not visible at the standoff distance");
  CalibrationResult result;
  result.brackets = cfg.brackets;
  result.point_cy = bbox_center(*standoff_box).y;
  const TargetPoint point{cfg.point.cx, result.point_cy};

  for (double d : grid.distances_m) {
    for (double s : grid.lateral_offsets_m) {
      GridSample sample;
      sample.distance_m = d;
      sample.lateral_m = s;
      if (auto box = box_at(d, s)) {
        sample.visible = true;
        const Vec2 c = bbox_center(*box);
        sample.delta = DetectionDelta{c.x - point.cx, c.y - point.cy, true};
      } else {
        ++result.skipped;
      }
      result.samples.push_back(sample);
    }
  }
  if (result.skipped == result.samples.size())
    throw ConfigError("calibrate: every grid position is out of view");

  // x threshold: half the |delta_x| at the smallest nonzero lateral offset,
  // measured at the grid distance nearest the standoff. Both offset signs
  // are averaged when present.
  double best_d = 0.0;
  bool have_d = false;
  for (const auto& s : result.samples) {
    if (!s.visible || s.lateral_m == 0.0) continue;
    if (!have_d || std::abs(s.distance_m - cfg.standoff_m) <
                       std::abs(best_d - cfg.standoff_m)) {
      best_d = s.distance_m;
      have_d = true;
    }
  }
  if (have_d) {
    double best_off = 0.0;
    for (const auto& s : result.samples)
      if (s.visible && s.distance_m == best_d && s.lateral_m != 0.0 &&
          (best_off == 0.0 || std::abs(s.lateral_m) < std::abs(best_off)))
        best_off = s.lateral_m;
    double sum = 0.0;
    int n = 0;
    for (const auto& s : result.samples)
      if (s.visible && s.distance_m == best_d &&
          std::abs(std::abs(s.lateral_m) - std::abs(best_off)) < 1e-12) {
        sum += std::abs(s.delta.dx);
        ++n;
      }
    result.brackets.x_thr = sum / n / 2.0;
  } else {
    result.notes.push_back(
        "no visible off-center sample; nav.x_thr left unchanged");
  }

  // y thresholds: half the centered |delta_y| at the grid distances nearest
  // the standoff from below (reverse trigger) and above (forward trigger).
  auto centered_delta_y = [&](bool below) -> std::optional<std::pair<double, double>> {
    bool found = false;
    double best = 0.0, dy = 0.0;
    for (const auto& s : result.samples) {
      if (!s.visible || s.lateral_m != 0.0) continue;
      if (below ? s.distance_m >= cfg.standoff_m : s.distance_m <= cfg.standoff_m)
        continue;
      if (!found || std::abs(s.distance_m - cfg.standoff_m) <
                        std::abs(best - cfg.standoff_m)) {
        best = s.distance_m;
        dy = s.delta.dy;
        found = true;
      }
    }
    if (!found) return std::nullopt;
    return std::make_pair(best, dy);
  };

  if (auto near = centered_delta_y(true)) {
    result.brackets.y_rev_thr = std::abs(near->second) / 2.0;
    if (!(near->second > 0.0))
      result.notes.push_back(
          "delta_y at the near distance is not positive; box-center height "
          "does not encode distance with the expected sign here");
  } else {
    result.notes.push_back(
        "no visible centered sample nearer than the standoff; nav.y_rev_thr "
        "left unchanged");
  }
  if (auto far = centered_delta_y(false)) {
    result.brackets.y_fwd_thr = std::abs(far->second) / 2.0;
    if (!(far->second < 0.0))
      result.notes.push_back(
          "delta_y at the far distance is not negative; box-center height "
          "does not encode distance with the expected sign here");
  } else {
    result.notes.push_back(
        "no visible centered sample farther than the standoff; nav.y_fwd_thr "
        "left unchanged");
  }
  result.brackets.validate();
  return result;
}

// Mergeable config fragment; appending it to a scenario file overrides the
// calibrated keys.
inline std::string emit_fragment(const CalibrationResult& r) {
  std::ostringstream out;
  out << "[nav]\n";
  out << "x_thr = " << detail::format_double(r.brackets.x_thr) << "\n";
  out << "y_fwd_thr = " << detail::format_double(r.brackets.y_fwd_thr) << "\n";
  out << "y_rev_thr = " << detail::format_double(r.brackets.y_rev_thr) << "\n";
  out << "\n[target]\n";
  out << "point_cy = " << detail::format_double(r.point_cy) << "\n";
  return out.str();
}

inline ScenarioConfig apply_calibration(ScenarioConfig cfg,
                                        const CalibrationResult& r) {
  cfg.brackets = r.brackets;
  cfg.point.cy = r.point_cy;
  return cfg;
}

// Human-readable grid table.
inline std::string format_grid(const CalibrationResult& r) {
  std::ostringstream out;
  out << "distance_m  lateral_m  visible   delta_x     delta_y\n";
  for (const auto& s : r.samples) {
    char line[160];
    if (s.visible)
      std::snprintf(line, sizeof line, "%9.3f %10.3f      yes %+9.5f  %+9.5f\n",
                    s.distance_m, s.lateral_m, s.delta.dx, s.delta.dy);
    else
      std::snprintf(line, sizeof line, "%9.3f %10.3f       no       -       -\n",
                    s.distance_m, s.lateral_m);
    out << line;
  }
  return out.str();
}

}  // namespace followsim
