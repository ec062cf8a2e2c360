#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "streetforge/geometry/fused_scene.hpp"

namespace streetforge {

// One anisotropic 3D Gaussian. Scales live in log space and opacity as a
// logit, so every real-valued parameter vector is a valid Gaussian. Color is
// view-independent RGB; semantics are K unnormalized logits.
struct Gaussian3D {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d log_scale = Eigen::Vector3d::Zero();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  double opacity_logit = 0.0;
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
  Eigen::VectorXd sem_logits;

  double opacity() const { return 1.0 / (1.0 + std::exp(-opacity_logit)); }
  Eigen::Vector3d scale() const { return log_scale.array().exp(); }
};

// Static Gaussians in the world frame plus per-object groups in canonical
// box frames, moved by their tracks at render time.
struct GaussianScene {
  int num_classes = 1;
  std::vector<Gaussian3D> statics;
  std::map<int, std::vector<Gaussian3D>> objects;
  std::vector<BBoxTrack> tracks;

  const BBoxTrack* find_track(int object_id) const {
    for (const auto& t : tracks)
      if (t.object_id == object_id) return &t;
    return nullptr;
  }

  size_t total_gaussians() const {
    size_t n = statics.size();
    for (const auto& [id, group] : objects) n += group.size();
    return n;
  }

  void validate() const {
    for (const auto& [id, group] : objects)
      require(find_track(id) != nullptr, "gaussian group without a track");
  }
};

// Seeds one Gaussian per stride-th point: mean and color from the point,
// isotropic scale from the mean distance to the 3 nearest kept neighbors
// (floored at 0.05 m), opacity logit 0, uniform semantic logits.
GaussianScene init_from_cloud(const FusedScene& scene, int stride, int num_classes);

// JSON header (counts, K, field layout, tracks) + f32 records.
void save_gaussian_scene(const GaussianScene& scene, const std::string& path);
GaussianScene load_gaussian_scene(const std::string& path);

}  // namespace streetforge
