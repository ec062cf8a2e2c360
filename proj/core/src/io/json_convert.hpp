#pragma once

// Internal JSON conversions shared by the manifest, fused-scene and
// gaussian-scene writers. Not installed.

#include <nlohmann/json.hpp>

#include "streetforge/geometry/track.hpp"

namespace streetforge {

inline nlohmann::json pose_to_json(const Pose& p) {
  return {{"rotation",
           {p.rotation().w(), p.rotation().x(), p.rotation().y(), p.rotation().z()}},
          {"translation",
           {p.translation().x(), p.translation().y(), p.translation().z()}}};
}

inline Pose pose_from_json(const nlohmann::json& j) {
  const auto& q = j.at("rotation");
  const auto& t = j.at("translation");
  return Pose(Eigen::Quaterniond(q.at(0), q.at(1), q.at(2), q.at(3)),
              Eigen::Vector3d(t.at(0), t.at(1), t.at(2)));
}

inline nlohmann::json track_to_json(const BBoxTrack& t) {
  nlohmann::json keys = nlohmann::json::array();
  for (size_t i = 0; i < t.times.size(); ++i) {
    nlohmann::json k = pose_to_json(t.poses[i]);
    k["t"] = t.times[i];
    keys.push_back(k);
  }
  return {{"object_id", t.object_id},
          {"size", {t.size.x(), t.size.y(), t.size.z()}},
          {"class_label", t.class_label},
          {"keyframes", keys}};
}

inline BBoxTrack track_from_json(const nlohmann::json& j) {
  BBoxTrack t;
  t.object_id = j.at("object_id").get<int>();
  const auto& s = j.at("size");
  t.size = Eigen::Vector3d(s.at(0), s.at(1), s.at(2));
  t.class_label = j.at("class_label").get<int>();
  for (const auto& k : j.at("keyframes")) {
    t.times.push_back(k.at("t").get<double>());
    t.poses.push_back(pose_from_json(k));
  }
  t.validate();
  return t;
}

}  // namespace streetforge
