#pragma once

#include "view/types.hpp"

namespace view {

/// Pinhole intrinsics plus a rigid camera-to-robot transform.
struct CameraModel {
  double fx{1.0};
  double fy{1.0};
  double cx{0.0};
  double cy{0.0};
  Eigen::Matrix4d extrinsic{Eigen::Matrix4d::Identity()};  // camera -> robot

  // fx, fy > 0 and orthonormal rotation block within 1e-6
  void validate() const;

  Vec3 camera_to_robot(const Vec3& p) const;
  Vec3 robot_to_camera(const Vec3& p) const;
};

/// Pinhole de-projection: pixel + depth to a robot-frame point.
/// Throws BadDepthError if depth <= 0 or non-finite.
Vec3 deproject(const CameraModel& cam, const PixelPoint& p, double depth);

/// Pinhole projection of a robot-frame point to pixels.
/// Throws BehindCameraError if the camera-frame z <= 0.
PixelPoint project(const CameraModel& cam, const Vec3& p);

/// Camera-frame depth of a robot-frame point (z after the extrinsic
/// inverse transform).
double camera_depth(const CameraModel& cam, const Vec3& p);

}  // namespace view
