#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "streetforge/geometry/point_cloud.hpp"
#include "streetforge/geometry/track.hpp"

namespace streetforge {

// Multi-frame LiDAR aggregate: the static background in the world frame and
// each tracked object's points in its canonical (box-centered) frame.
struct FusedScene {
  PointCloud static_world;
  std::map<int, PointCloud> objects;  // object_id -> canonical-frame cloud
  std::vector<BBoxTrack> tracks;

  const BBoxTrack* find_track(int object_id) const {
    for (const auto& t : tracks)
      if (t.object_id == object_id) return &t;
    return nullptr;
  }

  void validate() const {
    for (const auto& [id, cloud] : objects) {
      require(find_track(id) != nullptr, "object cloud without a track");
      cloud.validate();
    }
    static_world.validate();
    for (int id : static_world.object_ids)
      require(id == kStaticObjectId, "static cloud must carry object_id -1");
  }
};

struct SeparatedCloud {
  PointCloud static_points;                 // world frame
  std::map<int, PointCloud> dynamic;        // canonical box frames
};

// Assigns each world-frame point either to the box that strictly contains it
// at time t (nearest box center on overlap, lower id on exact tie) or to the
// static set. Tracks that do not cover t are skipped and reported through
// `warnings` when provided.
SeparatedCloud separate_dynamic(const PointCloud& cloud,
                                const std::vector<BBoxTrack>& tracks, double t,
                                std::vector<std::string>* warnings = nullptr);

// Fuses a timestamped frame sequence into static + per-object clouds.
FusedScene aggregate(const std::vector<std::pair<PointCloud, double>>& frames,
                     const std::vector<BBoxTrack>& tracks,
                     std::vector<std::string>* warnings = nullptr);

// Rebuilds a single world-frame cloud at time t; objects listed in `exclude`
// are left out.
PointCloud recompose(const FusedScene& scene, double t,
                     const std::set<int>& exclude = {});

}  // namespace streetforge
