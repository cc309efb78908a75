#include "view/camera.hpp"

namespace view {

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw ViewError("focal lengths must be positive");
  const Eigen::Matrix3d r = extrinsic.topLeftCorner<3, 3>();
  if ((r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6) {
    throw ViewError("extrinsic rotation block is not orthonormal");
  }
}

Vec3 CameraModel::camera_to_robot(const Vec3& p) const {
  return extrinsic.topLeftCorner<3, 3>() * p + extrinsic.topRightCorner<3, 1>();
}

Vec3 CameraModel::robot_to_camera(const Vec3& p) const {
  const Eigen::Matrix3d r = extrinsic.topLeftCorner<3, 3>();
  return r.transpose() * (p - extrinsic.topRightCorner<3, 1>());
}

Vec3 deproject(const CameraModel& cam, const PixelPoint& p, double depth) {
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw BadDepthError("depth must be positive and finite");
  }
  const Vec3 in_cam{(p.u - cam.cx) * depth / cam.fx,
                    (p.v - cam.cy) * depth / cam.fy, depth};
  return cam.camera_to_robot(in_cam);
}

PixelPoint project(const CameraModel& cam, const Vec3& p) {
  const Vec3 in_cam = cam.robot_to_camera(p);
  if (!(in_cam.z() > 0.0)) throw BehindCameraError("point behind camera");
  return PixelPoint{cam.fx * in_cam.x() / in_cam.z() + cam.cx,
                    cam.fy * in_cam.y() / in_cam.z() + cam.cy};
}

double camera_depth(const CameraModel& cam, const Vec3& p) {
  return cam.robot_to_camera(p).z();
}

}  // namespace view
