#pragma once

#include "streetforge/pipeline/bundle.hpp"
#include "streetforge/pipeline/metrics.hpp"
#include "streetforge/splat/optimize.hpp"

namespace streetforge {

struct TrainGsConfig {
  int init_stride = 1;
  OptimizeConfig opt;
};

struct TrainGsResult {
  GaussianScene scene;
  OptimizeTrace trace;
  MetricsReport report;
};

// Fuses the bundle, seeds Gaussians from the fused cloud, optimizes against
// the bundle's frames (real views) mixed with the given virtual views at
// probability theta, then renders and scores the eval views (the bundle's
// own frames when eval_views is empty).
TrainGsResult train_gs(const SceneBundle& bundle,
                       const std::vector<VirtualView>& virtual_views,
                       const TrainGsConfig& cfg,
                       const std::vector<VirtualView>& eval_views = {});

// Renders a scene at a view and packages the rasters for metrics.
ViewRasters render_view(const GaussianScene& scene, const CameraModel& cam,
                        const Pose& cam_to_world, double time);

// Bundle frames reinterpreted as virtual supervision (used when generated
// views are stored as a bundle directory).
std::vector<VirtualView> bundle_as_virtual_views(const SceneBundle& bundle);

}  // namespace streetforge
