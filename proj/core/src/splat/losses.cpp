#include "streetforge/splat/losses.hpp"

#include <cmath>

#include "streetforge/splat/ssim.hpp"

namespace streetforge {

namespace {

constexpr double kProbFloor = 1e-12;

// Mean |render - target| with gradient into adj (scaled by lambda).
double masked_l1(const std::vector<double>& render, const std::vector<double>& target,
                 const std::vector<bool>* mask, double lambda,
                 std::vector<double>& adj) {
  size_t count = 0;
  if (mask) {
    for (bool m : *mask) count += m;
  } else {
    count = render.size();
  }
  if (count == 0) return 0.0;
  double total = 0.0;
  for (size_t i = 0; i < render.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    double d = render[i] - target[i];
    total += std::abs(d);
    double sign = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
    adj[i] += lambda * sign / count;
  }
  return total / count;
}

}  // namespace

PerceptualLoss default_perceptual_loss() {
  return [](const std::vector<double>& render, const std::vector<double>& target,
            int width, int height, std::vector<double>& grad) {
    double ms = multiscale_ssim_with_grad(render, target, width, height, 3, grad);
    for (double& g : grad) g = -g;
    return 1.0 - ms;
  };
}

LossResult loss_input(const RenderOutput& render, const PseudoImage& gt_color,
                      const DepthMap& gt_depth, double lambda_l1,
                      double lambda_ssim, double lambda_depth) {
  require(render.width == gt_color.width && render.height == gt_color.height,
          "color raster size mismatch");
  require(render.width == gt_depth.width && render.height == gt_depth.height,
          "depth raster size mismatch");

  LossResult out;
  out.adjoint = render.zeros_like();
  double total = 0.0;

  if (lambda_l1 != 0.0)
    total += lambda_l1 *
             masked_l1(render.color, gt_color.values, nullptr, lambda_l1, out.adjoint.color);

  if (lambda_ssim != 0.0) {
    std::vector<double> g;
    double s = ssim_with_grad(render.color, gt_color.values, render.width,
                              render.height, 3, g);
    total += lambda_ssim * (1.0 - s);
    for (size_t i = 0; i < g.size(); ++i) out.adjoint.color[i] -= lambda_ssim * g[i];
  }

  if (lambda_depth != 0.0) {
    std::vector<bool> mask(gt_depth.values.size());
    size_t valid = 0;
    for (size_t i = 0; i < mask.size(); ++i) {
      mask[i] = gt_depth.values[i] > 0.0;
      valid += mask[i];
    }
    if (valid > 0)
      total += lambda_depth * masked_l1(render.depth, gt_depth.values, &mask,
                                        lambda_depth, out.adjoint.depth);
    // All-invalid depth: term is 0 by contract.
  }

  out.value = total;
  return out;
}

LossResult loss_virtual(const RenderOutput& render, const PseudoImage& v_color,
                        const DepthMap& v_depth, const SemanticMap& v_sem,
                        double lambda_vc, double lambda_vd, double lambda_vs,
                        const PerceptualLoss& perceptual) {
  require(render.width == v_color.width && render.height == v_color.height,
          "color raster size mismatch");
  require(render.width == v_depth.width && render.height == v_depth.height,
          "depth raster size mismatch");
  require(render.width == v_sem.width && render.height == v_sem.height,
          "semantic raster size mismatch");

  const int K = render.num_classes;
  LossResult out;
  out.adjoint = render.zeros_like();
  double total = 0.0;

  if (lambda_vc != 0.0) {
    std::vector<double> g;
    double d = perceptual(render.color, v_color.values, render.width,
                          render.height, g);
    total += lambda_vc * d;
    for (size_t i = 0; i < g.size(); ++i) out.adjoint.color[i] += lambda_vc * g[i];
  }

  if (lambda_vd != 0.0) {
    std::vector<bool> mask(v_depth.values.size());
    size_t valid = 0;
    for (size_t i = 0; i < mask.size(); ++i) {
      mask[i] = v_depth.values[i] > 0.0;
      valid += mask[i];
    }
    if (valid > 0)
      total += lambda_vd * masked_l1(render.depth, v_depth.values, &mask,
                                     lambda_vd, out.adjoint.depth);
  }

  if (lambda_vs != 0.0) {
    const size_t n = render.pixels();
    double ce = 0.0;
    for (size_t p = 0; p < n; ++p) {
      int label = v_sem.labels[p];
      require(label >= 0 && label < K, "label out of range");
      // Un-hit mass belongs to the background class 0.
      double prob = render.sem[p * K + label] +
                    (label == 0 ? 1.0 - render.alpha[p] : 0.0);
      double clamped = std::max(prob, kProbFloor);
      ce += -std::log(clamped);
      if (prob > kProbFloor) {
        double d = -lambda_vs / (clamped * n);
        out.adjoint.sem[p * K + label] += d;
        if (label == 0) out.adjoint.alpha[p] -= d;
      }
    }
    total += lambda_vs * ce / n;
  }

  out.value = total;
  return out;
}

}  // namespace streetforge
