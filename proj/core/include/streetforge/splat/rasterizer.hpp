#pragma once

#include "streetforge/geometry/pose.hpp"
#include "streetforge/image.hpp"
#include "streetforge/splat/gaussian_scene.hpp"

namespace streetforge {

// Rendered channels. Semantic entries are per-pixel probabilities that sum
// to alpha; the un-hit mass (1 - alpha) belongs to the background class.
struct RenderOutput {
  int width = 0;
  int height = 0;
  int num_classes = 1;
  std::vector<double> color;  // H*W*3
  std::vector<double> depth;  // H*W, meters
  std::vector<double> sem;    // H*W*K
  std::vector<double> alpha;  // H*W

  RenderOutput() = default;
  RenderOutput(int w, int h, int K)
      : width(w),
        height(h),
        num_classes(K),
        color(static_cast<size_t>(w) * h * 3, 0.0),
        depth(static_cast<size_t>(w) * h, 0.0),
        sem(static_cast<size_t>(w) * h * K, 0.0),
        alpha(static_cast<size_t>(w) * h, 0.0) {}

  size_t pixels() const { return static_cast<size_t>(width) * height; }

  // Zero-filled copy of this raster's shape, for building loss adjoints.
  RenderOutput zeros_like() const { return RenderOutput(width, height, num_classes); }
};

// Gradients of a scalar loss w.r.t. every Gaussian parameter, mirroring the
// scene layout.
struct GaussianGrad {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d log_scale = Eigen::Vector3d::Zero();
  Eigen::Vector4d rotation = Eigen::Vector4d::Zero();  // (w,x,y,z)
  double opacity_logit = 0.0;
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
  Eigen::VectorXd sem_logits;
};

struct SceneGrad {
  std::vector<GaussianGrad> statics;
  std::map<int, std::vector<GaussianGrad>> objects;
};

// Forward EWA splatting: perspective-projected anisotropic Gaussians,
// depth-sorted, alpha-composited front to back in 16x16 pixel tiles.
RenderOutput rasterize(const GaussianScene& scene, const CameraModel& cam,
                       const Pose& cam_to_world, double time);

// Analytic backward pass. `adjoint` holds dLoss/d(channel) per pixel; the
// returned gradients cover mean, log_scale, rotation, opacity logit, color
// and semantic logits. Per-tile partials are merged in tile order, so the
// result is bit-identical for any worker count.
SceneGrad rasterize_grad(const GaussianScene& scene, const CameraModel& cam,
                         const Pose& cam_to_world, double time,
                         const RenderOutput& adjoint);

}  // namespace streetforge
