#include "streetforge/modality/codec.hpp"

#include <algorithm>

namespace streetforge {

PseudoImage encode_depth3(const DepthMap& d, double d_max) {
  require(d_max > 0.0, "d_max must be positive");
  PseudoImage out(d.width, d.height);
  for (size_t i = 0; i < d.values.size(); ++i) {
    double v = std::clamp(d.values[i] / d_max, 0.0, 1.0);
    out.values[3 * i + 0] = v;
    out.values[3 * i + 1] = v;
    out.values[3 * i + 2] = v;
  }
  return out;
}

DepthMap decode_depth3(const PseudoImage& img, double d_max) {
  require(d_max > 0.0, "d_max must be positive");
  DepthMap out(img.width, img.height);
  for (size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = d_max *
        (img.values[3 * i] + img.values[3 * i + 1] + img.values[3 * i + 2]) / 3.0;
  }
  return out;
}

PseudoImage encode_semantic(const SemanticMap& s, const Palette& p) {
  PseudoImage out(s.width, s.height);
  const int K = p.K();
  for (size_t i = 0; i < s.labels.size(); ++i) {
    int label = s.labels[i];
    require(label >= 0 && label < K, "label out of palette");
    const Eigen::Vector3d& c = p.colors[label];
    out.values[3 * i + 0] = c.x();
    out.values[3 * i + 1] = c.y();
    out.values[3 * i + 2] = c.z();
  }
  return out;
}

SemanticMap decode_semantic(const PseudoImage& img, const Palette& p) {
  p.validate();
  SemanticMap out(img.width, img.height);
  for (size_t i = 0; i < out.labels.size(); ++i) {
    Eigen::Vector3d pixel(img.values[3 * i], img.values[3 * i + 1],
                          img.values[3 * i + 2]);
    int best = 0;
    double best_d2 = (pixel - p.colors[0]).squaredNorm();
    for (int k = 1; k < p.K(); ++k) {
      double d2 = (pixel - p.colors[k]).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = k;
      }
    }
    out.labels[i] = best;
  }
  return out;
}

}  // namespace streetforge
