#include "streetforge/geometry/fused_scene.hpp"

#include <limits>

namespace streetforge {

PointCloud transform_points(const PointCloud& cloud, const Pose& pose) {
  PointCloud out;
  out.positions.resize(cloud.size());
  out.colors = cloud.colors;
  out.object_ids = cloud.object_ids;
  const Eigen::Matrix3d r = pose.rotation().toRotationMatrix();
  for (size_t i = 0; i < cloud.size(); ++i)
    out.positions[i] = r * cloud.positions[i] + pose.translation();
  return out;
}

SeparatedCloud separate_dynamic(const PointCloud& cloud,
                                const std::vector<BBoxTrack>& tracks, double t,
                                std::vector<std::string>* warnings) {
  // Box poses at t, skipping tracks whose keyframe range misses t.
  struct ActiveBox {
    const BBoxTrack* track;
    Pose world_to_box;
    Eigen::Vector3d center;
  };
  std::vector<ActiveBox> active;
  active.reserve(tracks.size());
  for (const auto& tr : tracks) {
    if (!tr.covers(t)) {
      if (warnings)
        warnings->push_back("track " + std::to_string(tr.object_id) +
                            " has no keyframes covering t=" + std::to_string(t) +
                            "; skipped for containment");
      continue;
    }
    Pose box_pose = tr.pose_at(t);
    active.push_back({&tr, invert(box_pose), box_pose.translation()});
  }

  SeparatedCloud out;
  for (size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d& p = cloud.positions[i];
    const BBoxTrack* best = nullptr;
    Eigen::Vector3d best_canonical;
    double best_center_d2 = std::numeric_limits<double>::infinity();
    for (const auto& box : active) {
      Eigen::Vector3d canonical = box.world_to_box.apply(p);
      if (!box.track->contains_canonical(canonical)) continue;
      double d2 = (p - box.center).squaredNorm();
      bool closer = d2 < best_center_d2 ||
                    (d2 == best_center_d2 && best != nullptr &&
                     box.track->object_id < best->object_id);
      if (best == nullptr || closer) {
        best = box.track;
        best_canonical = canonical;
        best_center_d2 = d2;
      }
    }
    if (best) {
      out.dynamic[best->object_id].push(best_canonical, cloud.colors[i],
                                        best->object_id);
    } else {
      out.static_points.push(p, cloud.colors[i], kStaticObjectId);
    }
  }
  return out;
}

FusedScene aggregate(const std::vector<std::pair<PointCloud, double>>& frames,
                     const std::vector<BBoxTrack>& tracks,
                     std::vector<std::string>* warnings) {
  require(!frames.empty(), "no frames");
  FusedScene scene;
  scene.tracks = tracks;
  for (const auto& [cloud, t] : frames) {
    SeparatedCloud sep = separate_dynamic(cloud, tracks, t, warnings);
    scene.static_world.append(sep.static_points);
    for (auto& [id, pts] : sep.dynamic) scene.objects[id].append(pts);
  }
  return scene;
}

PointCloud recompose(const FusedScene& scene, double t,
                     const std::set<int>& exclude) {
  for (int id : exclude)
    require(scene.objects.count(id) > 0, "unknown object id");
  PointCloud out = scene.static_world;
  for (const auto& [id, cloud] : scene.objects) {
    if (exclude.count(id)) continue;
    const BBoxTrack* track = scene.find_track(id);
    require(track != nullptr, "object cloud without a track");
    PointCloud world = transform_points(cloud, track->pose_at(t));
    out.append(world);
  }
  return out;
}

}  // namespace streetforge
