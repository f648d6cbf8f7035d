#pragma once

// Pinhole camera model. The followed target is modeled as an upright
// rectangle standing on the ground plane, facing the camera (billboard
// oriented along the camera's right axis), and is projected into a
// normalized image-space bounding box.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

#include "followsim/geometry.hpp"

namespace followsim {

// Image coordinates are normalized to [0,1] with x rightward and y downward.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool valid() const {
    return 0.0 <= x_min && x_min < x_max && x_max <= 1.0 &&
           0.0 <= y_min && y_min < y_max && y_max <= 1.0;
  }
};

inline Vec2 bbox_center(const BoundingBox& b) {
  return {(b.x_min + b.x_max) / 2.0, (b.y_min + b.y_max) / 2.0};
}

struct CameraIntrinsics {
  double hfov_rad = std::numbers::pi / 2.0;  // horizontal field of view
  double aspect = 4.0 / 3.0;                 // frame width / height
  double mount_height_m = 0.15;              // lens height above ground
  double pitch_rad = deg_to_rad(-20.0);      // optical axis elevation, positive = up
  double min_box_area = 1e-4;                // smallest visible clipped box area

  void validate() const {
    if (!(hfov_rad > 0.0 && hfov_rad < std::numbers::pi))
      throw std::invalid_argument("camera: hfov_rad must be in (0, pi)");
    if (!(aspect > 0.0))
      throw std::invalid_argument("camera: aspect must be positive");
    if (!(mount_height_m >= 0.0))
      throw std::invalid_argument("camera: mount_height_m must be >= 0");
    if (!(pitch_rad > -std::numbers::pi / 2.0 &&
          pitch_rad < std::numbers::pi / 2.0))
      throw std::invalid_argument("camera: pitch_rad must be in (-pi/2, pi/2)");
    if (!(min_box_area >= 0.0))
      throw std::invalid_argument("camera: min_box_area must be >= 0");
  }
};

struct TargetShape {
  double height_m = 1.7;  // adult person
  double width_m = 0.5;

  void validate() const {
    if (!(height_m > 0.0 && width_m > 0.0))
      throw std::invalid_argument("target: shape dimensions must be positive");
  }
};

// Published every control tick; truth_box is empty when the target is out of
// view (behind the image plane, outside the frame, or below the minimum
// visible area).
struct CameraFrame {
  std::uint64_t frame = 0;
  std::optional<BoundingBox> truth_box;
};

// Project the target rectangle through the pinhole model and clip to the
// frame. The rectangle stands on the ground at `target`, spans
// shape.width_m along the camera's right axis and shape.height_m upward.
inline std::optional<BoundingBox> project_target(const Pose& follower,
                                                 const Vec2& target,
                                                 const TargetShape& shape,
                                                 const CameraIntrinsics& cam) {
  const double ch = std::cos(follower.heading);
  const double sh = std::sin(follower.heading);
  const double cp = std::cos(cam.pitch_rad);
  const double sp = std::sin(cam.pitch_rad);

  // Camera basis in world coordinates (z up). The right axis stays
  // horizontal under pure pitch.
  const double fwd[3] = {ch * cp, sh * cp, sp};
  const double down[3] = {ch * sp, sh * sp, -cp};
  const double right[3] = {sh, -ch, 0.0};

  const double cam_z = cam.mount_height_m;
  auto to_camera = [&](double wx, double wy, double wz, double out[3]) {
    const double vx = wx - follower.x;
    const double vy = wy - follower.y;
    const double vz = wz - cam_z;
    out[0] = vx * right[0] + vy * right[1];
    out[1] = vx * down[0] + vy * down[1] + vz * down[2];
    out[2] = vx * fwd[0] + vy * fwd[1] + vz * fwd[2];
  };

  double c[3];
  to_camera(target.x, target.y, shape.height_m / 2.0, c);
  if (c[2] <= 0.0) return std::nullopt;  // target center behind the image plane

  const double tan_h = std::tan(cam.hfov_rad / 2.0);
  const double tan_v = tan_h / cam.aspect;

  double x_lo = std::numeric_limits<double>::infinity();
  double y_lo = std::numeric_limits<double>::infinity();
  double x_hi = -std::numeric_limits<double>::infinity();
  double y_hi = -std::numeric_limits<double>::infinity();
  const double half_w = shape.width_m / 2.0;
  for (double side : {-half_w, half_w}) {
    for (double wz : {0.0, shape.height_m}) {
      double p[3];
      to_camera(target.x + side * right[0], target.y + side * right[1], wz, p);
      if (p[2] < 1e-9) return std::nullopt;  // corner grazing the image plane
      const double ix = 0.5 + p[0] / p[2] / (2.0 * tan_h);
      const double iy = 0.5 + p[1] / p[2] / (2.0 * tan_v);
      x_lo = std::min(x_lo, ix);
      x_hi = std::max(x_hi, ix);
      y_lo = std::min(y_lo, iy);
      y_hi = std::max(y_hi, iy);
    }
  }

  BoundingBox box{std::max(0.0, x_lo), std::max(0.0, y_lo),
                  std::min(1.0, x_hi), std::min(1.0, y_hi)};
  if (!(box.x_min < box.x_max && box.y_min < box.y_max)) return std::nullopt;
  if (!(box.area() > cam.min_box_area)) return std::nullopt;
  return box;
}

}  // namespace followsim
