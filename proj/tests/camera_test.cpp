#include "followsim/camera.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "followsim/geometry.hpp"

namespace followsim {
namespace {

CameraIntrinsics level_cam() {
  CameraIntrinsics cam;
  cam.hfov_rad = deg_to_rad(90.0);
  cam.aspect = 4.0 / 3.0;
  cam.mount_height_m = 0.15;
  cam.pitch_rad = 0.0;
  return cam;
}

TEST(BBox, CenterExamples) {
  const Vec2 unit = bbox_center(BoundingBox{0, 0, 1, 1});
  EXPECT_DOUBLE_EQ(unit.x, 0.5);
  EXPECT_DOUBLE_EQ(unit.y, 0.5);
  const Vec2 c = bbox_center(BoundingBox{0.2, 0.4, 0.4, 0.8});
  EXPECT_NEAR(c.x, 0.3, 1e-15);
  EXPECT_NEAR(c.y, 0.6, 1e-15);
  const Vec2 tiny = bbox_center(BoundingBox{0.5, 0.5, 0.5001, 0.5001});
  EXPECT_NEAR(tiny.x, 0.5, 1e-4);
  EXPECT_NEAR(tiny.y, 0.5, 1e-4);
}

TEST(Camera, WidthOracleLevelNinetyDegrees) {
  // Target width 0.5 m straight ahead at 2.0 m, level 90-degree camera:
  // box width = (0.5/2.0)/(2*tan(45deg)) = 0.125.
  CameraIntrinsics cam = level_cam();
  TargetShape shape{1.7, 0.5};
  auto box = project_target(Pose{0, 0, 0}, Vec2{2.0, 0.0}, shape, cam);
  ASSERT_TRUE(box.has_value());
  EXPECT_NEAR(box->width(), 0.125, 1e-12);
  EXPECT_NEAR(bbox_center(*box).x, 0.5, 1e-12);
}

TEST(Camera, OnAxisHorizontallyCentered) {
  CameraIntrinsics cam;  // pitched default
  TargetShape shape;
  for (double d : {0.8, 1.5, 2.0, 3.0, 4.5}) {
    auto box = project_target(Pose{0, 0, 0}, Vec2{d, 0.0}, shape, cam);
    ASSERT_TRUE(box.has_value()) << "d=" << d;
    EXPECT_NEAR(bbox_center(*box).x, 0.5, 1e-12) << "d=" << d;
  }
}

TEST(Camera, BehindCameraInvisible) {
  CameraIntrinsics cam;
  TargetShape shape;
  EXPECT_FALSE(project_target(Pose{0, 0, 0}, Vec2{-2.0, 0.0}, shape, cam)
                   .has_value());
  // Heading flipped: a target at +x is now behind.
  EXPECT_FALSE(
      project_target(Pose{0, 0, std::numbers::pi}, Vec2{2.0, 0.0}, shape, cam)
          .has_value());
}

TEST(Camera, MirrorSymmetry) {
  CameraIntrinsics cam;
  TargetShape shape;
  for (double s : {0.1, 0.3, 0.7}) {
    auto left = project_target(Pose{0, 0, 0}, Vec2{2.0, s}, shape, cam);
    auto right = project_target(Pose{0, 0, 0}, Vec2{2.0, -s}, shape, cam);
    ASSERT_TRUE(left.has_value());
    ASSERT_TRUE(right.has_value());
    const double cl = bbox_center(*left).x;
    const double cr = bbox_center(*right).x;
    EXPECT_NEAR(cl, 1.0 - cr, 1e-9) << "s=" << s;
    EXPECT_LT(cl, 0.5);  // positive lateral offset = left of center in image
  }
}

TEST(Camera, CenterHeightDecreasesWithDistanceUnderDefaultPitch) {
  // With the default tilted camera the head is clipped at the frame top in
  // the whole operating band, so the box center tracks the feet and its
  // image height falls as the target recedes. This is the sign the
  // navigation depth bracket depends on.
  CameraIntrinsics cam;
  TargetShape shape;
  double prev = std::numeric_limits<double>::infinity();
  for (double d = 1.2; d <= 4.5; d += 0.1) {
    auto box = project_target(Pose{0, 0, 0}, Vec2{d, 0.0}, shape, cam);
    ASSERT_TRUE(box.has_value()) << "d=" << d;
    EXPECT_DOUBLE_EQ(box->y_min, 0.0) << "head not clipped at d=" << d;
    const double cy = bbox_center(*box).y;
    EXPECT_LT(cy, prev) << "d=" << d;
    prev = cy;
  }
}

TEST(Camera, FarTinyBoxCulledByMinArea) {
  CameraIntrinsics cam = level_cam();
  cam.min_box_area = 1e-4;
  TargetShape shape{0.02, 0.02};
  // A 2 cm square 3 m out projects far below the area floor.
  EXPECT_FALSE(
      project_target(Pose{0, 0, 0}, Vec2{3.0, 0.0}, shape, cam).has_value());
}

TEST(Camera, OutOfFovClippedEmpty) {
  CameraIntrinsics cam;
  TargetShape shape;
  // 90-degree HFOV: a target at 60 degrees bearing is fully outside.
  EXPECT_FALSE(
      project_target(Pose{0, 0, 0}, Vec2{1.0, 1.8}, shape, cam).has_value());
}

TEST(Camera, BoxWithinUnitSquare) {
  CameraIntrinsics cam;
  TargetShape shape;
  for (double d = 0.7; d < 5.0; d += 0.3) {
    for (double s = -1.5; s <= 1.5; s += 0.25) {
      auto box = project_target(Pose{0, 0, 0}, Vec2{d, s}, shape, cam);
      if (!box) continue;
      EXPECT_GE(box->x_min, 0.0);
      EXPECT_GE(box->y_min, 0.0);
      EXPECT_LE(box->x_max, 1.0);
      EXPECT_LE(box->y_max, 1.0);
      EXPECT_LT(box->x_min, box->x_max);
      EXPECT_LT(box->y_min, box->y_max);
    }
  }
}

TEST(Camera, IntrinsicsValidate) {
  CameraIntrinsics cam;
  EXPECT_NO_THROW(cam.validate());
  cam.hfov_rad = 0.0;
  EXPECT_THROW(cam.validate(), std::invalid_argument);
  cam = CameraIntrinsics{};
  cam.aspect = -1.0;
  EXPECT_THROW(cam.validate(), std::invalid_argument);
  cam = CameraIntrinsics{};
  cam.mount_height_m = 0.0;  // ground-level lens is allowed
  EXPECT_NO_THROW(cam.validate());
  cam.mount_height_m = -0.01;
  EXPECT_THROW(cam.validate(), std::invalid_argument);
}

TEST(Geometry, NormalizeAngle) {
  EXPECT_DOUBLE_EQ(normalize_angle(0.0), 0.0);
  EXPECT_NEAR(normalize_angle(3 * std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_NEAR(normalize_angle(-std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_NEAR(normalize_angle(2 * std::numbers::pi + 0.25), 0.25, 1e-12);
  EXPECT_NEAR(normalize_angle(-2 * std::numbers::pi - 0.25), -0.25, 1e-12);
}

}  // namespace
}  // namespace followsim
