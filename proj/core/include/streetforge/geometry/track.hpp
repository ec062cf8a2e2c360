#pragma once

#include <Eigen/Dense>
#include <vector>

#include "streetforge/common.hpp"
#include "streetforge/geometry/pose.hpp"

namespace streetforge {

// Tracked bounding box: full extents (meters) along the box-frame x/y/z axes
// and a timestamped trajectory of box-center poses. Queries between
// keyframes interpolate linearly in translation and spherically in rotation;
// queries outside the keyframe range clamp to the nearest keyframe.
struct BBoxTrack {
  int object_id = 0;
  Eigen::Vector3d size = Eigen::Vector3d::Zero();  // (length, width, height)
  int class_label = 0;
  std::vector<double> times;
  std::vector<Pose> poses;

  void validate() const {
    require(size.x() > 0 && size.y() > 0 && size.z() > 0,
            "box size components must be positive");
    require(!times.empty() && times.size() == poses.size(),
            "track needs at least one keyframe");
    for (size_t i = 1; i < times.size(); ++i)
      require(times[i] > times[i - 1], "keyframe timestamps must strictly increase");
  }

  bool covers(double t) const {
    return t >= times.front() && t <= times.back();
  }

  // Box-center pose at time t (clamped outside the keyframe range).
  Pose pose_at(double t) const {
    if (t <= times.front()) return poses.front();
    if (t >= times.back()) return poses.back();
    size_t hi = 1;
    while (times[hi] < t) ++hi;
    size_t lo = hi - 1;
    double span = times[hi] - times[lo];
    double a = (t - times[lo]) / span;
    Eigen::Quaterniond q = poses[lo].rotation().slerp(a, poses[hi].rotation());
    Eigen::Vector3d tr = (1.0 - a) * poses[lo].translation() + a * poses[hi].translation();
    return Pose(q, tr);
  }

  // Strict interior test in the box frame; boundary points are outside.
  bool contains_canonical(const Eigen::Vector3d& p_box) const {
    return std::abs(p_box.x()) < 0.5 * size.x() &&
           std::abs(p_box.y()) < 0.5 * size.y() &&
           std::abs(p_box.z()) < 0.5 * size.z();
  }
};

}  // namespace streetforge
