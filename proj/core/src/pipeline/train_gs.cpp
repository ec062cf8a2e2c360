#include "streetforge/pipeline/train_gs.hpp"

#include <algorithm>

namespace streetforge {

ViewRasters render_view(const GaussianScene& scene, const CameraModel& cam,
                        const Pose& cam_to_world, double time) {
  RenderOutput render = rasterize(scene, cam, cam_to_world, time);
  ViewRasters out;
  out.color = PseudoImage(render.width, render.height);
  for (size_t i = 0; i < render.color.size(); ++i)
    out.color.values[i] = std::clamp(render.color[i], 0.0, 1.0);
  out.depth = DepthMap(render.width, render.height);
  out.depth.values = render.depth;

  // Semantic argmax with the un-hit mass on the background class.
  out.semantic = SemanticMap(render.width, render.height);
  const int K = render.num_classes;
  for (size_t p = 0; p < render.pixels(); ++p) {
    int best = 0;
    double best_p = render.sem[p * K] + (1.0 - render.alpha[p]);
    for (int k = 1; k < K; ++k) {
      if (render.sem[p * K + k] > best_p) {
        best_p = render.sem[p * K + k];
        best = k;
      }
    }
    out.semantic.labels[p] = best;
  }
  return out;
}

std::vector<VirtualView> bundle_as_virtual_views(const SceneBundle& bundle) {
  std::vector<VirtualView> views;
  for (const auto& f : bundle.frames) {
    VirtualView v;
    v.cam = bundle.camera;
    v.cam_to_world = f.cam_to_world;
    v.time = f.timestamp;
    v.color = f.color;
    v.depth = f.depth;
    v.sem = f.semantic;
    views.push_back(std::move(v));
  }
  return views;
}

TrainGsResult train_gs(const SceneBundle& bundle,
                       const std::vector<VirtualView>& virtual_views,
                       const TrainGsConfig& cfg,
                       const std::vector<VirtualView>& eval_views) {
  bundle.validate();
  FusedScene fused = aggregate(bundle.lidar_frames(), bundle.tracks);
  GaussianScene scene = init_from_cloud(fused, cfg.init_stride, bundle.palette.K());

  std::vector<RealView> real_views;
  for (const auto& f : bundle.frames) {
    RealView r;
    r.cam = bundle.camera;
    r.cam_to_world = f.cam_to_world;
    r.time = f.timestamp;
    r.color = f.color;
    r.depth = f.depth;
    real_views.push_back(std::move(r));
  }

  TrainGsResult result;
  result.scene = optimize(std::move(scene), real_views, virtual_views, cfg.opt,
                          &result.trace);

  std::vector<ViewRasters> renders, gts;
  if (eval_views.empty()) {
    for (const auto& f : bundle.frames) {
      renders.push_back(render_view(result.scene, bundle.camera, f.cam_to_world,
                                    f.timestamp));
      gts.push_back({f.color, f.depth, f.semantic});
    }
  } else {
    for (const auto& v : eval_views) {
      renders.push_back(render_view(result.scene, v.cam, v.cam_to_world, v.time));
      gts.push_back({v.color, v.depth, v.sem});
    }
  }
  result.report = eval_metrics(renders, gts);
  return result;
}

}  // namespace streetforge
