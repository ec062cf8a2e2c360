#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "streetforge/common.hpp"

namespace streetforge {

// Rigid transform: rotation as a unit quaternion plus a translation in
// meters. Construction normalizes and validates, so downstream operations
// can assume a well-formed pose.
class Pose {
 public:
  Pose() : rotation_(Eigen::Quaterniond::Identity()), translation_(0, 0, 0) {}

  Pose(const Eigen::Quaterniond& rotation, const Eigen::Vector3d& translation)
      : rotation_(rotation), translation_(translation) {
    require(rotation_.coeffs().allFinite() && translation_.allFinite(),
            "pose components must be finite");
    double n = rotation_.norm();
    require(n > 1e-12, "zero quaternion");
    rotation_.normalize();
  }

  static Pose identity() { return Pose(); }

  const Eigen::Quaterniond& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation_ * p + translation_;
  }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.block<3, 3>(0, 0) = rotation_.toRotationMatrix();
    m.block<3, 1>(0, 3) = translation_;
    return m;
  }

 private:
  Eigen::Quaterniond rotation_;
  Eigen::Vector3d translation_;
};

// a ∘ b: applies b first, then a.
inline Pose compose(const Pose& a, const Pose& b) {
  Eigen::Quaterniond q = a.rotation() * b.rotation();
  q.normalize();
  return Pose(q, a.rotation() * b.translation() + a.translation());
}

inline Pose invert(const Pose& p) {
  Eigen::Quaterniond qi = p.rotation().conjugate();
  return Pose(qi, -(qi * p.translation()));
}

// Pure helper for callers that only need the inverse applied once.
inline Eigen::Vector3d apply_inverse(const Pose& p, const Eigen::Vector3d& x) {
  return p.rotation().conjugate() * (x - p.translation());
}

// Pinhole camera. Camera frame is x-right, y-down, z-forward; the continuous
// pixel coordinate u equals the pixel index at the pixel center, so
// unproject(project(p)) round-trips exactly.
struct CameraModel {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  CameraModel() = default;
  CameraModel(double fx_, double fy_, double cx_, double cy_, int w, int h)
      : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(w), height(h) {
    require(fx > 0 && fy > 0, "focal lengths must be positive");
    require(w > 0 && h > 0, "raster dims must be positive");
    require(cx >= 0 && cx < w && cy >= 0 && cy < h,
            "principal point must lie inside the raster");
  }

  // Camera-frame point -> continuous pixel coordinates. Caller guarantees z > 0.
  Eigen::Vector2d project(const Eigen::Vector3d& p_cam) const {
    return {fx * p_cam.x() / p_cam.z() + cx, fy * p_cam.y() / p_cam.z() + cy};
  }

  // Continuous pixel + depth -> camera-frame point.
  Eigen::Vector3d unproject(double u, double v, double depth) const {
    return {(u - cx) / fx * depth, (v - cy) / fy * depth, depth};
  }
};

}  // namespace streetforge
