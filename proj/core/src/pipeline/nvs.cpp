#include "streetforge/pipeline/nvs.hpp"

#include <cmath>

#include "streetforge/geometry/depth_ops.hpp"

namespace streetforge {

namespace {

// Deterministic per-view completion of the sparse conditions, one
// pseudo-image per task.
PseudoImage complete_view(const SceneBundle& bundle, const SparseMap& view,
                          TaskId task) {
  std::vector<int32_t> nearest = nearest_valid_index_map(view);
  switch (task) {
    case TaskId::Color: {
      PseudoImage img(view.width, view.height);
      for (size_t p = 0; p < nearest.size(); ++p)
        for (int c = 0; c < 3; ++c)
          img.values[3 * p + c] = view.color[3 * static_cast<size_t>(nearest[p]) + c];
      return img;
    }
    case TaskId::Depth:
      return encode_depth3(densify_depth(view), bundle.d_max);
    case TaskId::Semantic: {
      PseudoImage filled(view.width, view.height);
      for (size_t p = 0; p < nearest.size(); ++p)
        for (int c = 0; c < 3; ++c)
          filled.values[3 * p + c] = view.color[3 * static_cast<size_t>(nearest[p]) + c];
      SemanticMap labels = decode_semantic(filled, bundle.palette);
      return encode_semantic(labels, bundle.palette);
    }
  }
  throw ValidationError("unknown task");
}

// Point-mass Gaussian oracle over the concatenated per-view completion
// latents; predicts per task at prediction time.
class CompletionOracle final : public Denoiser {
 public:
  CompletionOracle(const SceneBundle& bundle,
                   const std::vector<SparseMap>& conditions,
                   const NoiseSchedule& sched)
      : sched_(sched) {
    require(!conditions.empty(), "no condition views");
    for (int task = 0; task < 3; ++task) {
      std::vector<LatentTensor> parts;
      for (const auto& view : conditions)
        parts.push_back(
            latent_encode(complete_view(bundle, view, static_cast<TaskId>(task))));
      LatentTensor mu(parts[0].h, parts[0].w,
                      parts[0].c * static_cast<int>(parts.size()));
      for (int y = 0; y < mu.h; ++y)
        for (int x = 0; x < mu.w; ++x)
          for (size_t v = 0; v < parts.size(); ++v)
            for (int c = 0; c < parts[0].c; ++c)
              mu.at(x, y, static_cast<int>(v) * parts[0].c + c) = parts[v].at(x, y, c);
      oracles_[task] = std::make_unique<GaussianOracle>(std::move(mu), 0.0, sched);
    }
  }

  LatentTensor predict_v(const LatentTensor& x_t, int t,
                         const ConditionStack& cond) const override {
    return oracles_[static_cast<int>(cond.task)]->predict_v(x_t, t, cond);
  }

  std::array<int, 3> latent_shape(const ConditionStack& cond) const override {
    return oracles_[static_cast<int>(cond.task)]->latent_shape(cond);
  }

 private:
  const NoiseSchedule& sched_;
  std::array<std::unique_ptr<GaussianOracle>, 3> oracles_;
};

}  // namespace

std::unique_ptr<Denoiser> make_completion_oracle(
    const SceneBundle& bundle, const std::vector<SparseMap>& conditions,
    const NoiseSchedule& sched) {
  return std::make_unique<CompletionOracle>(bundle, conditions, sched);
}

std::vector<NovelView> shifted_trajectory(const SceneBundle& bundle, double shift) {
  std::vector<NovelView> out;
  for (const auto& f : bundle.frames) {
    NovelView v;
    v.cam_to_world = Pose(
        f.cam_to_world.rotation(),
        f.cam_to_world.translation() +
            f.cam_to_world.rotation() * Eigen::Vector3d(shift, 0, 0));
    v.time = f.timestamp;
    out.push_back(v);
  }
  return out;
}

NvsResult run_feedforward_nvs(const SceneBundle& bundle,
                              const std::vector<NovelView>& trajectory,
                              const Denoiser* denoiser, const NoiseSchedule& sched,
                              const NvsConfig& cfg) {
  require(!trajectory.empty(), "trajectory is empty");
  bundle.validate();

  FusedScene fused = aggregate(bundle.lidar_frames(), bundle.tracks);

  // Sparse conditions at every novel pose.
  NvsResult result;
  for (const auto& view : trajectory) {
    PointCloud cloud = recompose(fused, view.time);
    result.conditions.push_back(
        project_sparse(cloud, bundle.camera, view.cam_to_world));
  }

  // Reference: the observed frame nearest in time to the trajectory start;
  // its own sparse projection fills the depth queue's slot 0.
  result.reference_frame = bundle.nearest_frame(trajectory.front().time);
  const FrameData& ref = bundle.frames[result.reference_frame];
  PointCloud ref_cloud = recompose(fused, ref.timestamp);
  SparseMap ref_sparse = project_sparse(ref_cloud, bundle.camera, ref.cam_to_world);

  std::unique_ptr<Denoiser> fallback;
  if (denoiser == nullptr) {
    fallback = make_completion_oracle(bundle, result.conditions, sched);
    denoiser = fallback.get();
  }

  const int n_views = static_cast<int>(trajectory.size());
  result.views.resize(n_views);
  const int latent_c = default_codec().latent_channels();

  for (TaskId task : cfg.tasks) {
    ConditionStack stack =
        build_infer_stack(ref.color, ref_sparse, result.conditions, task, bundle.d_max);
    LatentTensor joint = sample(*denoiser, stack, sched, cfg.sampling);
    require(joint.c == latent_c * n_views,
            "denoiser latent width does not cover the trajectory");

    for (int v = 0; v < n_views; ++v) {
      LatentTensor z(joint.h, joint.w, latent_c);
      for (int y = 0; y < z.h; ++y)
        for (int x = 0; x < z.w; ++x)
          for (int c = 0; c < latent_c; ++c)
            z.at(x, y, c) = joint.at(x, y, v * latent_c + c);
      PseudoImage img = latent_decode(z);
      switch (task) {
        case TaskId::Color:
          result.views[v].color = std::move(img);
          break;
        case TaskId::Depth:
          result.views[v].depth = decode_depth3(img, bundle.d_max);
          break;
        case TaskId::Semantic:
          result.views[v].semantic = decode_semantic(img, bundle.palette);
          break;
      }
    }
  }
  return result;
}

}  // namespace streetforge
