#pragma once

#include <optional>

#include "streetforge/splat/losses.hpp"

namespace streetforge {

constexpr double kDefaultVirtualProb = 0.2;

// Observed view with ground-truth color and (possibly sparse) depth.
struct RealView {
  CameraModel cam;
  Pose cam_to_world;
  double time = 0.0;
  PseudoImage color;
  DepthMap depth;  // 0 = invalid
};

// Generated view used as extra supervision: dense color, depth and labels.
struct VirtualView {
  CameraModel cam;
  Pose cam_to_world;
  double time = 0.0;
  PseudoImage color;
  DepthMap depth;
  SemanticMap sem;
};

struct OptimizeConfig {
  int iters = 3000;
  double theta = kDefaultVirtualProb;  // virtual-view pick probability
  LossWeights weights;
  uint64_t seed = 0;

  // Per-field Adam learning rates.
  double lr_mean = 1.6e-4;
  double lr_scale = 5e-3;
  double lr_rotation = 5e-3;
  double lr_opacity = 5e-2;
  double lr_color = 2.5e-3;
  double lr_sem = 2.5e-3;

  // Maintenance: prune faint Gaussians and clone high-gradient ones.
  int densify_interval = 500;
  double prune_opacity = 0.005;
  double clone_percentile = 0.99;
  bool densify = true;

  std::optional<PerceptualLoss> perceptual;  // default proxy when unset
};

struct OptimizeTrace {
  std::vector<double> loss;       // one entry per iteration
  size_t real_picks = 0;
  size_t virtual_picks = 0;       // call counter for the theta frequency check
  std::vector<size_t> gaussian_counts;  // after each maintenance pass
};

// Stochastic optimization over mixed real/virtual supervision: with
// probability theta an iteration draws a virtual view (loss_virtual),
// otherwise a real view (loss_input). Throws NumericalError with the
// iteration index if the loss stops being finite.
GaussianScene optimize(GaussianScene scene, const std::vector<RealView>& real_views,
                       const std::vector<VirtualView>& virtual_views,
                       const OptimizeConfig& cfg, OptimizeTrace* trace = nullptr);

}  // namespace streetforge
