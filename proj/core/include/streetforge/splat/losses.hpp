#pragma once

#include <functional>

#include "streetforge/image.hpp"
#include "streetforge/splat/rasterizer.hpp"

namespace streetforge {

// Loss weights. The input-view weights follow the common splatting split
// (0.8 L1 / 0.2 SSIM) plus a depth term; virtual-view weights are exposed in
// config and modest by default.
struct LossWeights {
  double l1 = 0.8;
  double ssim = 0.2;
  double depth = 0.1;
  double v_color = 0.5;
  double v_depth = 0.1;
  double v_sem = 0.1;
};

struct LossResult {
  double value = 0.0;
  RenderOutput adjoint;  // dLoss/d(render channel), fed to rasterize_grad
};

// Pluggable perceptual distance on color rasters: returns the distance and
// writes d(distance)/d(render) into grad. Default: 1 - multi-scale SSIM over
// 3 dyadic scales.
using PerceptualLoss = std::function<double(
    const std::vector<double>& render, const std::vector<double>& target,
    int width, int height, std::vector<double>& grad)>;

PerceptualLoss default_perceptual_loss();

// Input-view objective: l1*L1(color) + ssim*(1 - SSIM) + depth*masked-L1.
// gt_depth pixels at 0 are invalid and excluded; an all-invalid depth map
// contributes 0 (warning semantics, not an error).
LossResult loss_input(const RenderOutput& render, const PseudoImage& gt_color,
                      const DepthMap& gt_depth, double lambda_l1,
                      double lambda_ssim, double lambda_depth);

// Virtual-view objective: v_color*perceptual + v_depth*masked-L1 +
// v_sem*cross-entropy over rendered per-pixel class probabilities. The
// un-hit probability mass (1 - alpha) counts toward the background class 0.
LossResult loss_virtual(const RenderOutput& render, const PseudoImage& v_color,
                        const DepthMap& v_depth, const SemanticMap& v_sem,
                        double lambda_vc, double lambda_vd, double lambda_vs,
                        const PerceptualLoss& perceptual = default_perceptual_loss());

}  // namespace streetforge
