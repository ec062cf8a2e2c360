#pragma once

#include <cstdint>
#include <vector>

#include "streetforge/geometry/fused_scene.hpp"
#include "streetforge/image.hpp"

namespace streetforge {

// Points closer than this to the camera plane are culled before projection.
constexpr double kZNear = 0.1;

// Z-buffered projection of a point cloud: per-pixel nearest depth (meters,
// 0.0 = invalid) plus the color of the winning point.
struct SparseMap {
  int width = 0;
  int height = 0;
  std::vector<double> depth;   // row-major, 0.0 = invalid
  std::vector<double> color;   // row-major interleaved RGB, defined where depth > 0

  SparseMap() = default;
  SparseMap(int w, int h)
      : width(w),
        height(h),
        depth(static_cast<size_t>(w) * h, 0.0),
        color(static_cast<size_t>(w) * h * 3, 0.0) {}

  double depth_at(int x, int y) const {
    return depth[static_cast<size_t>(y) * width + x];
  }
  bool valid_at(int x, int y) const { return depth_at(x, y) > 0.0; }

  size_t valid_count() const {
    size_t n = 0;
    for (double d : depth) n += d > 0.0;
    return n;
  }

  DepthMap depth_map() const {
    DepthMap out(width, height);
    out.values = depth;
    return out;
  }

  // Invalid pixels are black; callers that need a mask use the depth channel.
  PseudoImage color_image() const {
    PseudoImage out(width, height);
    out.values = color;
    return out;
  }
};

// Per-pixel index of the point that won the z-buffer (-1 where invalid).
using ProjectionTrace = std::vector<int32_t>;

// Projects a world-frame cloud through the camera at cam_to_world. Points
// behind the near plane or outside the raster are culled; ties at equal
// depth keep the lower point index.
SparseMap project_sparse(const PointCloud& cloud, const CameraModel& cam,
                         const Pose& cam_to_world,
                         ProjectionTrace* trace = nullptr);

// Aggregates `window` consecutive frames centered on target_index (clamped
// at the ends of the sequence), recomposes at the target timestamp and
// projects into the target view.
SparseMap build_gt_depth(const std::vector<std::pair<PointCloud, double>>& frames,
                         const std::vector<BBoxTrack>& tracks, int target_index,
                         int window, const CameraModel& cam,
                         const Pose& cam_to_world);

}  // namespace streetforge
