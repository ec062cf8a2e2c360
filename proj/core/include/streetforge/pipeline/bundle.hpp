#pragma once

#include <string>
#include <vector>

#include "streetforge/geometry/fused_scene.hpp"
#include "streetforge/image.hpp"
#include "streetforge/modality/codec.hpp"
#include "streetforge/modality/palette.hpp"

namespace streetforge {

// One captured (or generated) frame. The LiDAR cloud is world-frame at the
// frame's timestamp and may be absent for generated bundles.
struct FrameData {
  double timestamp = 0.0;
  Pose cam_to_world;
  PseudoImage color;
  DepthMap depth;
  SemanticMap semantic;
  PointCloud lidar;
  bool has_lidar = false;
};

// On-disk scene: manifest.json plus per-frame rasters (color PNG, depth PFM,
// semantic PNG) and packed LiDAR clouds. Camera frame is x-right, y-down,
// z-forward; distances in meters.
struct SceneBundle {
  CameraModel camera;
  std::vector<FrameData> frames;
  std::vector<BBoxTrack> tracks;
  Palette palette;
  double d_max = kDefaultDepthMax;

  void validate() const;

  // World-frame LiDAR with timestamps, ready for aggregation.
  std::vector<std::pair<PointCloud, double>> lidar_frames() const;

  int nearest_frame(double timestamp) const;
};

void write_bundle(const SceneBundle& bundle, const std::string& dir);
SceneBundle read_bundle(const std::string& dir);

}  // namespace streetforge
