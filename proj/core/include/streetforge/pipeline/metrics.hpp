#pragma once

#include <string>
#include <vector>

#include "streetforge/image.hpp"

namespace streetforge {

constexpr double kPsnrCap = 99.0;

// One evaluated view's rasters.
struct ViewRasters {
  PseudoImage color;
  DepthMap depth;
  SemanticMap semantic;
};

struct ViewMetrics {
  double psnr = 0.0;       // dB, capped at 99
  double ssim = 0.0;
  double depth_mae = 0.0;  // meters, over valid GT pixels
  double sem_accuracy = 0.0;
  double sem_miou = 0.0;
};

struct MetricsReport {
  std::vector<ViewMetrics> views;
  ViewMetrics mean;

  void write_json(const std::string& path) const;
};

// PSNR/SSIM on color, MAE on valid-GT depth, accuracy and mean IoU on
// labels (classes absent from both rasters are skipped by the IoU mean).
MetricsReport eval_metrics(const std::vector<ViewRasters>& renders,
                           const std::vector<ViewRasters>& gts);

double psnr(const PseudoImage& a, const PseudoImage& b);

}  // namespace streetforge
