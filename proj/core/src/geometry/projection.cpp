#include "streetforge/geometry/projection.hpp"

#include <algorithm>
#include <cmath>

namespace streetforge {

SparseMap project_sparse(const PointCloud& cloud, const CameraModel& cam,
                         const Pose& cam_to_world, ProjectionTrace* trace) {
  SparseMap map(cam.width, cam.height);
  if (trace) trace->assign(static_cast<size_t>(cam.width) * cam.height, -1);

  const Pose world_to_cam = invert(cam_to_world);
  const Eigen::Matrix3d r = world_to_cam.rotation().toRotationMatrix();
  const Eigen::Vector3d t = world_to_cam.translation();

  for (size_t i = 0; i < cloud.size(); ++i) {
    Eigen::Vector3d p = r * cloud.positions[i] + t;
    if (p.z() <= kZNear) continue;
    Eigen::Vector2d uv = cam.project(p);
    int px = static_cast<int>(std::lround(uv.x()));
    int py = static_cast<int>(std::lround(uv.y()));
    if (px < 0 || px >= cam.width || py < 0 || py >= cam.height) continue;
    size_t idx = static_cast<size_t>(py) * cam.width + px;
    // Strict less: the first point at the minimum depth wins.
    if (map.depth[idx] == 0.0 || p.z() < map.depth[idx]) {
      map.depth[idx] = p.z();
      map.color[idx * 3 + 0] = cloud.colors[i].x();
      map.color[idx * 3 + 1] = cloud.colors[i].y();
      map.color[idx * 3 + 2] = cloud.colors[i].z();
      if (trace) (*trace)[idx] = static_cast<int32_t>(i);
    }
  }
  return map;
}

SparseMap build_gt_depth(const std::vector<std::pair<PointCloud, double>>& frames,
                         const std::vector<BBoxTrack>& tracks, int target_index,
                         int window, const CameraModel& cam,
                         const Pose& cam_to_world) {
  require(window >= 1, "window must be >= 1");
  require(!frames.empty(), "no frames");
  require(target_index >= 0 && target_index < static_cast<int>(frames.size()),
          "target frame out of range");

  int n = static_cast<int>(frames.size());
  int span = std::min(window, n);
  int start = std::clamp(target_index - (span - 1) / 2, 0, n - span);

  std::vector<std::pair<PointCloud, double>> slice(frames.begin() + start,
                                                   frames.begin() + start + span);
  FusedScene fused = aggregate(slice, tracks);
  PointCloud world = recompose(fused, frames[target_index].second);
  return project_sparse(world, cam, cam_to_world);
}

}  // namespace streetforge
