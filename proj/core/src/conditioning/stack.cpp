#include "streetforge/conditioning/stack.hpp"

#include "streetforge/modality/codec.hpp"

namespace streetforge {

namespace {

LatentTensor encode_sparse_color(const SparseMap& view) {
  return latent_encode(view.color_image());
}

LatentTensor encode_sparse_depth(const SparseMap& view, double d_max) {
  return latent_encode(encode_depth3(view.depth_map(), d_max));
}

}  // namespace

ConditionStack build_train_stack(const PseudoImage& ref_image,
                                 const std::vector<SparseMap>& sparse_views,
                                 TaskId task, double drop_p, Rng& rng,
                                 double d_max) {
  require(!sparse_views.empty(), "need at least the reference view's projection");
  for (const auto& v : sparse_views)
    require(v.width == ref_image.width && v.height == ref_image.height,
            "sparse views and reference image must share the raster size");

  ConditionStack stack;
  stack.task = task;
  stack.ref_latent = latent_encode(ref_image);
  stack.color_latents.push_back(stack.ref_latent);  // dense entry 0
  for (size_t i = 1; i < sparse_views.size(); ++i)
    stack.color_latents.push_back(encode_sparse_color(sparse_views[i]));
  for (const auto& v : sparse_views)
    stack.depth_latents.push_back(encode_sparse_depth(v, d_max));

  if (rng.uniform() < drop_p) {
    LatentTensor zero(stack.ref_latent.h, stack.ref_latent.w, stack.ref_latent.c);
    stack.ref_latent = zero;
    stack.color_latents[0] = std::move(zero);
    stack.ref_dropped = true;
  }
  stack.validate();
  return stack;
}

ConditionStack build_infer_stack(const PseudoImage& ref_image,
                                 const SparseMap& ref_sparse_depth,
                                 const std::vector<SparseMap>& novel_views,
                                 TaskId task, double d_max) {
  require(ref_sparse_depth.width == ref_image.width &&
              ref_sparse_depth.height == ref_image.height,
          "reference projection must share the raster size");
  for (const auto& v : novel_views)
    require(v.width == ref_image.width && v.height == ref_image.height,
            "novel views and reference image must share the raster size");

  ConditionStack stack;
  stack.task = task;
  stack.ref_latent = latent_encode(ref_image);
  stack.color_latents.push_back(stack.ref_latent);
  stack.depth_latents.push_back(encode_sparse_depth(ref_sparse_depth, d_max));
  for (const auto& v : novel_views) {
    stack.color_latents.push_back(encode_sparse_color(v));
    stack.depth_latents.push_back(encode_sparse_depth(v, d_max));
  }
  stack.validate();
  return stack;
}

ConditionStack edit_reference(const ConditionStack& stack,
                              const PseudoImage& new_ref_image) {
  LatentTensor z = latent_encode(new_ref_image);
  require(z.same_shape(stack.color_latents.at(0)),
          "replacement image size does not match the stack");
  ConditionStack out = stack;
  out.ref_latent = z;
  out.color_latents[0] = std::move(z);
  out.ref_dropped = false;
  return out;
}

FusedScene edit_remove_object(const FusedScene& scene, int object_id) {
  require(scene.objects.count(object_id) > 0, "unknown object id");
  FusedScene out;
  out.static_world = scene.static_world;
  for (const auto& [id, cloud] : scene.objects)
    if (id != object_id) out.objects[id] = cloud;
  for (const auto& track : scene.tracks)
    if (track.object_id != object_id) out.tracks.push_back(track);
  return out;
}

}  // namespace streetforge
