#include "streetforge/pipeline/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "../io/json_convert.hpp"
#include "streetforge/rng.hpp"

namespace streetforge {

Eigen::Quaterniond upright_box_rotation() {
  Eigen::Matrix3d r;
  r.col(0) = Eigen::Vector3d(0, 0, 1);
  r.col(1) = Eigen::Vector3d(-1, 0, 0);
  r.col(2) = Eigen::Vector3d(0, -1, 0);
  return Eigen::Quaterniond(r);
}

namespace {

struct Hit {
  double t = std::numeric_limits<double>::infinity();  // camera-z depth
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
  int label = 0;
  int object_id = kStaticObjectId;
  bool valid = false;
};

// Slab test in the box frame. Ray must start outside; returns entry t.
bool ray_box(const Pose& box_pose, const Eigen::Vector3d& half,
             const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
             double& t_hit) {
  Eigen::Vector3d o = apply_inverse(box_pose, origin);
  Eigen::Vector3d d = box_pose.rotation().conjugate() * dir;
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-12) {
      if (std::abs(o[a]) >= half[a]) return false;
      continue;
    }
    double ta = (-half[a] - o[a]) / d[a];
    double tb = (half[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  if (t0 <= 1e-9) return false;  // starts inside or touching
  t_hit = t0;
  return true;
}

struct SceneAtTime {
  const SynthSpec* spec;
  std::vector<std::pair<SynthBox, Pose>> boxes;  // box + world pose at t
};

SceneAtTime scene_at(const SynthSpec& spec, double time,
                     const BBoxTrack* moving_track) {
  SceneAtTime s{&spec, {}};
  for (const auto& b : spec.static_boxes) s.boxes.emplace_back(b, b.pose);
  if (spec.moving_box && moving_track)
    s.boxes.emplace_back(*spec.moving_box, moving_track->pose_at(time));
  return s;
}

// Casts the ray through continuous pixel (u, v); dir_cam.z = 1, so the ray
// parameter equals camera-z depth.
Hit cast_ray(const SceneAtTime& scene, const CameraModel& cam,
             const Pose& cam_to_world, double u, double v) {
  Eigen::Vector3d dir_cam((u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0);
  Eigen::Vector3d origin = cam_to_world.translation();
  Eigen::Vector3d dir = cam_to_world.rotation() * dir_cam;

  Hit hit;
  const SynthSpec& spec = *scene.spec;
  if (dir.y() > 1e-12) {
    double t = (spec.ground_height - origin.y()) / dir.y();
    if (t > 1e-9) {
      hit.t = t;
      hit.color = spec.ground_color;
      hit.label = 1;
      hit.valid = true;
    }
  }
  for (size_t i = 0; i < scene.boxes.size(); ++i) {
    const auto& [box, pose] = scene.boxes[i];
    double t;
    if (ray_box(pose, 0.5 * box.size, origin, dir, t) && t < hit.t) {
      hit.t = t;
      hit.color = box.color;
      hit.label = box.class_label;
      hit.valid = true;
      bool is_moving = spec.moving_box && i + 1 == scene.boxes.size();
      hit.object_id = is_moving ? spec.moving_object_id : kStaticObjectId;
    }
  }
  return hit;
}

CameraModel make_camera(const SynthSpec& spec) {
  double f = 0.5 * spec.width / std::tan(0.5 * spec.fov_deg * M_PI / 180.0);
  return CameraModel(f, f, 0.5 * (spec.width - 1), 0.5 * (spec.height - 1),
                     spec.width, spec.height);
}

BBoxTrack make_moving_track(const SynthSpec& spec) {
  const SynthBox& box = *spec.moving_box;
  BBoxTrack track;
  track.object_id = spec.moving_object_id;
  track.size = box.size;
  track.class_label = box.class_label;
  double dist = (spec.moving_end.translation() - box.pose.translation()).norm();
  double travel = dist / std::max(spec.moving_speed, 1e-9);
  double t_last = (spec.frame_count - 1) * spec.frame_dt;
  track.times.push_back(0.0);
  track.poses.push_back(box.pose);
  if (travel <= 0.0 || dist == 0.0) {
    track.times.push_back(t_last);
    track.poses.push_back(box.pose);
  } else {
    track.times.push_back(travel);
    track.poses.push_back(spec.moving_end);
    if (travel < t_last) {
      track.times.push_back(t_last);
      track.poses.push_back(spec.moving_end);
    }
  }
  track.validate();
  return track;
}

FrameData raycast_frame(const SynthSpec& spec, const CameraModel& cam,
                        const Pose& cam_to_world, double time,
                        const BBoxTrack* moving_track) {
  SceneAtTime scene = scene_at(spec, time, moving_track);

  // Degenerate-pose check: the camera center must sit outside every box.
  for (const auto& [box, pose] : scene.boxes) {
    Eigen::Vector3d local = apply_inverse(pose, cam_to_world.translation());
    if (std::abs(local.x()) < 0.5 * box.size.x() &&
        std::abs(local.y()) < 0.5 * box.size.y() &&
        std::abs(local.z()) < 0.5 * box.size.z())
      throw ValidationError("degenerate camera");
  }

  FrameData f;
  f.timestamp = time;
  f.cam_to_world = cam_to_world;
  f.color = PseudoImage(cam.width, cam.height);
  f.depth = DepthMap(cam.width, cam.height);
  f.semantic = SemanticMap(cam.width, cam.height);
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      Hit hit = cast_ray(scene, cam, cam_to_world, x, y);
      if (!hit.valid) continue;  // sky: black, depth 0, label 0
      f.depth.at(x, y) = hit.t;
      f.semantic.at(x, y) = hit.label;
      for (int c = 0; c < 3; ++c) f.color.at(x, y, c) = hit.color[c];
    }
  }
  return f;
}

PointCloud raycast_lidar(const SynthSpec& spec, const CameraModel& cam,
                         const Pose& cam_to_world, double time, int frame_index,
                         const BBoxTrack* moving_track) {
  SceneAtTime scene = scene_at(spec, time, moving_track);
  const size_t pixels = static_cast<size_t>(cam.width) * cam.height;
  const size_t rays = std::min<size_t>(spec.lidar_rays, pixels);

  // Seeded partial Fisher-Yates pick of distinct pixels.
  std::vector<uint32_t> ids(pixels);
  for (size_t i = 0; i < pixels; ++i) ids[i] = static_cast<uint32_t>(i);
  Rng rng(spec.seed, 100 + static_cast<uint64_t>(frame_index));
  PointCloud cloud;
  cloud.reserve(rays);
  for (size_t i = 0; i < rays; ++i) {
    size_t j = i + rng.uniform_index(pixels - i);
    std::swap(ids[i], ids[j]);
    int px = static_cast<int>(ids[i] % cam.width);
    int py = static_cast<int>(ids[i] / cam.width);
    Hit hit = cast_ray(scene, cam, cam_to_world, px, py);
    if (!hit.valid) continue;
    Eigen::Vector3d dir_cam((px - cam.cx) / cam.fx, (py - cam.cy) / cam.fy, 1.0);
    Eigen::Vector3d p = cam_to_world.translation() +
                        cam_to_world.rotation() * (dir_cam * hit.t);
    cloud.push(p, hit.color, hit.object_id);
  }
  return cloud;
}

int palette_size_for(const SynthSpec& spec) {
  int max_label = 1;  // ground
  for (const auto& b : spec.static_boxes) max_label = std::max(max_label, b.class_label);
  if (spec.moving_box) max_label = std::max(max_label, spec.moving_box->class_label);
  require(max_label < 32, "class labels must stay below 32");
  return max_label + 1;
}

}  // namespace

FrameData raycast_view(const SynthSpec& spec, const Pose& cam_to_world,
                       double time) {
  spec.validate();
  CameraModel cam = make_camera(spec);
  BBoxTrack track;
  const BBoxTrack* track_ptr = nullptr;
  if (spec.moving_box) {
    track = make_moving_track(spec);
    track_ptr = &track;
  }
  return raycast_frame(spec, cam, cam_to_world, time, track_ptr);
}

SceneBundle gen_synthetic_scene(const SynthSpec& spec) {
  spec.validate();
  SceneBundle bundle;
  bundle.camera = make_camera(spec);
  bundle.d_max = spec.d_max;
  bundle.palette = default_palette(palette_size_for(spec));

  BBoxTrack track;
  const BBoxTrack* track_ptr = nullptr;
  if (spec.moving_box) {
    track = make_moving_track(spec);
    track_ptr = &track;
    bundle.tracks.push_back(track);
  }

  for (int i = 0; i < spec.frame_count; ++i) {
    double time = i * spec.frame_dt;
    Pose cam_pose(Eigen::Quaterniond::Identity(),
                  Eigen::Vector3d(0, 0, spec.cam_speed * time));
    FrameData f = raycast_frame(spec, bundle.camera, cam_pose, time, track_ptr);
    f.lidar = raycast_lidar(spec, bundle.camera, cam_pose, time, i, track_ptr);
    f.has_lidar = true;
    bundle.frames.push_back(std::move(f));
  }
  bundle.validate();
  return bundle;
}

SynthSpec load_synth_spec(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open: " + path);
  nlohmann::json j = nlohmann::json::parse(in);

  SynthSpec spec;
  spec.seed = j.value("seed", spec.seed);
  spec.width = j.value("width", spec.width);
  spec.height = j.value("height", spec.height);
  spec.frame_count = j.value("frame_count", spec.frame_count);
  spec.frame_dt = j.value("frame_dt", spec.frame_dt);
  spec.fov_deg = j.value("fov_deg", spec.fov_deg);
  spec.ground_height = j.value("ground_height", spec.ground_height);
  spec.lidar_rays = j.value("lidar_rays", spec.lidar_rays);
  spec.cam_speed = j.value("cam_speed", spec.cam_speed);
  spec.d_max = j.value("d_max", spec.d_max);
  if (j.contains("ground_color")) {
    const auto& c = j.at("ground_color");
    spec.ground_color = Eigen::Vector3d(c.at(0), c.at(1), c.at(2));
  }

  auto parse_box = [](const nlohmann::json& jb) {
    SynthBox box;
    if (jb.contains("pose")) {
      box.pose = pose_from_json(jb.at("pose"));
    } else {
      const auto& c = jb.at("center");
      box.pose = Pose(upright_box_rotation(), Eigen::Vector3d(c.at(0), c.at(1), c.at(2)));
    }
    if (jb.contains("size")) {
      const auto& s = jb.at("size");
      box.size = Eigen::Vector3d(s.at(0), s.at(1), s.at(2));
    }
    if (jb.contains("color")) {
      const auto& c = jb.at("color");
      box.color = Eigen::Vector3d(c.at(0), c.at(1), c.at(2));
    }
    box.class_label = jb.value("class_label", box.class_label);
    return box;
  };

  for (const auto& jb : j.value("static_boxes", nlohmann::json::array()))
    spec.static_boxes.push_back(parse_box(jb));
  if (j.contains("moving_box")) {
    const auto& jm = j.at("moving_box");
    spec.moving_box = parse_box(jm);
    const auto& e = jm.at("end_center");
    spec.moving_end = Pose(spec.moving_box->pose.rotation(),
                           Eigen::Vector3d(e.at(0), e.at(1), e.at(2)));
    spec.moving_speed = jm.value("speed", spec.moving_speed);
    spec.moving_object_id = jm.value("object_id", spec.moving_object_id);
  }
  spec.validate();
  return spec;
}

}  // namespace streetforge
