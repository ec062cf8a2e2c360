#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "streetforge/common.hpp"

namespace streetforge {

// Single-channel depth raster in meters. 0.0 marks an invalid pixel; a
// forward-facing camera can never measure zero depth, so the sentinel is
// unambiguous.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major, height*width

  DepthMap() = default;
  DepthMap(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

  double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return values.size(); }

  void validate() const {
    require(values.size() == static_cast<size_t>(width) * height,
            "depth map size mismatch");
    for (double v : values)
      require(std::isfinite(v) && v >= 0.0, "depth values must be finite and >= 0");
  }
};

// Label raster; every label must be in [0, K) for the palette in use.
struct SemanticMap {
  int width = 0;
  int height = 0;
  std::vector<int> labels;  // row-major

  SemanticMap() = default;
  SemanticMap(int w, int h, int fill = 0)
      : width(w), height(h), labels(static_cast<size_t>(w) * h, fill) {}

  int& at(int x, int y) { return labels[static_cast<size_t>(y) * width + x]; }
  int at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
};

// 3-channel raster with values in [0,1]. Used both for observed RGB images
// and for the pseudo-image encodings of depth and semantics.
struct PseudoImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major, interleaved RGB

  PseudoImage() = default;
  PseudoImage(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<size_t>(w) * h * 3, fill) {}

  double& at(int x, int y, int c) {
    return values[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  double at(int x, int y, int c) const {
    return values[(static_cast<size_t>(y) * width + x) * 3 + c];
  }

  void validate() const {
    require(values.size() == static_cast<size_t>(width) * height * 3,
            "pseudo image size mismatch");
    for (double v : values)
      require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
              "pseudo image values must lie in [0,1]");
  }
};

// Latent raster of shape (h, w, c); the spatial dims are the image dims
// divided by the codec factor.
struct LatentTensor {
  int h = 0;
  int w = 0;
  int c = 0;
  std::vector<double> values;  // row-major, channel-interleaved

  LatentTensor() = default;
  LatentTensor(int h_, int w_, int c_, double fill = 0.0)
      : h(h_), w(w_), c(c_), values(static_cast<size_t>(h_) * w_ * c_, fill) {}

  double& at(int x, int y, int ch) {
    return values[(static_cast<size_t>(y) * w + x) * c + ch];
  }
  double at(int x, int y, int ch) const {
    return values[(static_cast<size_t>(y) * w + x) * c + ch];
  }
  size_t size() const { return values.size(); }
  bool same_shape(const LatentTensor& o) const {
    return h == o.h && w == o.w && c == o.c;
  }
};

}  // namespace streetforge
