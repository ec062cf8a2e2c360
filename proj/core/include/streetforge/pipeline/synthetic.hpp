#pragma once

#include <optional>
#include <string>

#include "streetforge/pipeline/bundle.hpp"

namespace streetforge {

// An axis box placed in the world; the pose's rotation maps the box frame
// (x = length, y = width, z = height) into the world.
struct SynthBox {
  Pose pose;
  Eigen::Vector3d size = Eigen::Vector3d(4.0, 1.8, 1.6);
  Eigen::Vector3d color = Eigen::Vector3d(0.8, 0.2, 0.2);
  int class_label = 2;
};

// Procedural street scene: a ground plane, static boxes, at most one box
// moving from start to end at constant speed, and a forward-moving camera.
// The raycaster gives exact color/depth/semantic ground truth; LiDAR clouds
// are raycast hits through seeded pixel picks.
struct SynthSpec {
  uint64_t seed = 0;
  int width = 64;
  int height = 64;
  int frame_count = 10;
  double frame_dt = 0.1;
  double fov_deg = 60.0;

  double ground_height = 1.5;  // y-down world: ground plane at y = +1.5
  Eigen::Vector3d ground_color = Eigen::Vector3d(0.35, 0.4, 0.3);

  std::vector<SynthBox> static_boxes;

  std::optional<SynthBox> moving_box;  // pose = start
  Pose moving_end;
  double moving_speed = 2.0;
  int moving_object_id = 1;

  int lidar_rays = 1024;
  double cam_speed = 2.0;  // camera advances along +z
  double d_max = kDefaultDepthMax;

  void validate() const {
    require(frame_count >= 2, "frame count must be >= 2");
    require(lidar_rays >= 1, "ray count must be >= 1");
    require(width > 0 && height > 0 && frame_dt > 0 && fov_deg > 0, "bad raster spec");
  }
};

// Box rotation used by the generator: box x -> world z (travel), box y ->
// world -x, box z -> world -y (up).
Eigen::Quaterniond upright_box_rotation();

SceneBundle gen_synthetic_scene(const SynthSpec& spec);

// Ground truth at an arbitrary pose/time, for virtual-view supervision and
// held-out evaluation.
FrameData raycast_view(const SynthSpec& spec, const Pose& cam_to_world,
                       double time);

SynthSpec load_synth_spec(const std::string& path);

}  // namespace streetforge
