#pragma once

#include <array>
#include <vector>

#include "streetforge/geometry/projection.hpp"
#include "streetforge/image.hpp"
#include "streetforge/modality/codec.hpp"
#include "streetforge/modality/latent.hpp"
#include "streetforge/rng.hpp"

namespace streetforge {

constexpr double kDefaultRefDropout = 0.2;

// Which modality the denoiser is asked to produce; serialized as a 3-entry
// one-hot embedding in the conditioning channel.
enum class TaskId { Color = 0, Depth = 1, Semantic = 2 };

inline std::array<double, 3> task_one_hot(TaskId task) {
  std::array<double, 3> v{0.0, 0.0, 0.0};
  v[static_cast<int>(task)] = 1.0;
  return v;
}

// Conditional input queue for the diffusion core. Per modality it holds N+1
// latents: entry 0 of the color list is always dense (the encoded reference
// image, or zeros when dropout fired), entries 1..N are encoded sparse
// projections. Depth entries are sparse for all of 0..N and are never
// dropped.
struct ConditionStack {
  std::vector<LatentTensor> color_latents;
  std::vector<LatentTensor> depth_latents;
  LatentTensor ref_latent;  // mirror of color_latents[0]
  TaskId task = TaskId::Color;
  bool ref_dropped = false;

  int entries() const { return static_cast<int>(color_latents.size()); }

  void validate() const {
    require(!color_latents.empty() && color_latents.size() == depth_latents.size(),
            "color and depth lists must have equal length >= 1");
    for (const auto& z : color_latents)
      require(z.same_shape(color_latents[0]), "stack latents must share shape");
    for (const auto& z : depth_latents)
      require(z.same_shape(color_latents[0]), "stack latents must share shape");
    require(ref_latent.same_shape(color_latents[0]),
            "reference latent must share the stack shape");
  }
};

// Training-time stack: entry 0 of the color queue is the encoded dense
// reference image (substituted for the frame-0 sparse projection); with
// probability drop_p the reference latent is replaced by zeros and
// ref_dropped is set.
ConditionStack build_train_stack(const PseudoImage& ref_image,
                                 const std::vector<SparseMap>& sparse_views,
                                 TaskId task, double drop_p, Rng& rng,
                                 double d_max = kDefaultDepthMax);

// Inference-time stack: the reference is an observed dense frame adjacent to
// the novel trajectory; novel_views[i] conditions entry i+1 of the color
// queue. ref_sparse_depth fills the depth queue's entry 0. No dropout.
ConditionStack build_infer_stack(const PseudoImage& ref_image,
                                 const SparseMap& ref_sparse_depth,
                                 const std::vector<SparseMap>& novel_views,
                                 TaskId task, double d_max = kDefaultDepthMax);

// Replaces only the reference slot (position 0 of the color queue and the
// ref_latent mirror); sparse entries are untouched.
ConditionStack edit_reference(const ConditionStack& stack,
                              const PseudoImage& new_ref_image);

// Removes an object and its track from the fused scene, so every later
// recompose/projection excludes it.
FusedScene edit_remove_object(const FusedScene& scene, int object_id);

}  // namespace streetforge
