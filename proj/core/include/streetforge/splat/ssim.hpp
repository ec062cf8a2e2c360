#pragma once

#include <vector>

#include "streetforge/common.hpp"

namespace streetforge {

// Mean local SSIM over an 11x11 Gaussian window (sigma 1.5), C1 = 0.01^2,
// C2 = 0.03^2, dynamic range 1. Windows must fit entirely inside the image;
// the mean runs over those positions, per channel, then over channels.
// Operates on interleaved multi-channel rasters.
double ssim(const std::vector<double>& a, const std::vector<double>& b, int width,
            int height, int channels);

// SSIM plus d(ssim)/d(a) accumulated into grad_a (same layout as a).
double ssim_with_grad(const std::vector<double>& a, const std::vector<double>& b,
                      int width, int height, int channels,
                      std::vector<double>& grad_a);

// Mean SSIM over `scales` dyadic scales (2x2 average pooling between
// scales). 1 - multiscale_ssim is the default perceptual-distance proxy.
// Scales too small for the 11x11 window are dropped.
double multiscale_ssim(const std::vector<double>& a, const std::vector<double>& b,
                       int width, int height, int channels, int scales = 3);

double multiscale_ssim_with_grad(const std::vector<double>& a,
                                 const std::vector<double>& b, int width,
                                 int height, int channels,
                                 std::vector<double>& grad_a, int scales = 3);

}  // namespace streetforge
