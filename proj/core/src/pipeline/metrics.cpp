#include "streetforge/pipeline/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "streetforge/splat/ssim.hpp"

namespace streetforge {

double psnr(const PseudoImage& a, const PseudoImage& b) {
  require(a.width == b.width && a.height == b.height, "psnr shape mismatch");
  double mse = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    double d = a.values[i] - b.values[i];
    mse += d * d;
  }
  mse /= a.values.size();
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

MetricsReport eval_metrics(const std::vector<ViewRasters>& renders,
                           const std::vector<ViewRasters>& gts) {
  require(renders.size() == gts.size() && !renders.empty(),
          "render/gt counts must match and be nonempty");

  MetricsReport report;
  for (size_t v = 0; v < renders.size(); ++v) {
    const ViewRasters& r = renders[v];
    const ViewRasters& g = gts[v];
    require(r.color.width == g.color.width && r.color.height == g.color.height,
            "color raster size mismatch");
    require(r.depth.width == g.depth.width && r.depth.height == g.depth.height,
            "depth raster size mismatch");
    require(r.semantic.width == g.semantic.width &&
                r.semantic.height == g.semantic.height,
            "semantic raster size mismatch");

    ViewMetrics m;
    m.psnr = psnr(r.color, g.color);
    m.ssim = ssim(r.color.values, g.color.values, r.color.width, r.color.height, 3);

    double mae = 0.0;
    size_t valid = 0;
    for (size_t i = 0; i < g.depth.values.size(); ++i) {
      if (g.depth.values[i] <= 0.0) continue;
      mae += std::abs(r.depth.values[i] - g.depth.values[i]);
      ++valid;
    }
    m.depth_mae = valid > 0 ? mae / valid : 0.0;

    int K = 1;
    for (int l : g.semantic.labels) K = std::max(K, l + 1);
    for (int l : r.semantic.labels) K = std::max(K, l + 1);
    std::vector<size_t> inter(K, 0), uni(K, 0);
    size_t correct = 0;
    for (size_t i = 0; i < g.semantic.labels.size(); ++i) {
      int gl = g.semantic.labels[i];
      int rl = r.semantic.labels[i];
      if (gl == rl) {
        ++correct;
        ++inter[gl];
        ++uni[gl];
      } else {
        ++uni[gl];
        ++uni[rl];
      }
    }
    m.sem_accuracy = static_cast<double>(correct) / g.semantic.labels.size();
    double iou_sum = 0.0;
    int iou_classes = 0;
    for (int k = 0; k < K; ++k) {
      if (uni[k] == 0) continue;
      iou_sum += static_cast<double>(inter[k]) / uni[k];
      ++iou_classes;
    }
    m.sem_miou = iou_classes > 0 ? iou_sum / iou_classes : 1.0;
    report.views.push_back(m);
  }

  ViewMetrics& mean = report.mean;
  for (const auto& m : report.views) {
    mean.psnr += m.psnr;
    mean.ssim += m.ssim;
    mean.depth_mae += m.depth_mae;
    mean.sem_accuracy += m.sem_accuracy;
    mean.sem_miou += m.sem_miou;
  }
  double n = static_cast<double>(report.views.size());
  mean.psnr /= n;
  mean.ssim /= n;
  mean.depth_mae /= n;
  mean.sem_accuracy /= n;
  mean.sem_miou /= n;
  return report;
}

void MetricsReport::write_json(const std::string& path) const {
  auto to_json = [](const ViewMetrics& m) {
    return nlohmann::json{{"psnr", m.psnr},
                          {"ssim", m.ssim},
                          {"depth_mae", m.depth_mae},
                          {"sem_accuracy", m.sem_accuracy},
                          {"sem_miou", m.sem_miou}};
  };
  nlohmann::json j;
  j["mean"] = to_json(mean);
  nlohmann::json per_view = nlohmann::json::array();
  for (const auto& m : views) per_view.push_back(to_json(m));
  j["views"] = per_view;
  std::ofstream out(path);
  require(out.good(), "cannot open for write: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace streetforge
