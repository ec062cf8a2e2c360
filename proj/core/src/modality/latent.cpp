#include "streetforge/modality/latent.hpp"

#include <algorithm>

namespace streetforge {

LatentTensor SpaceToDepthCodec::encode(const PseudoImage& img) const {
  const int f = factor_;
  require(img.width % f == 0 && img.height % f == 0,
          "image dims must be divisible by the codec factor");
  LatentTensor z(img.height / f, img.width / f, 3 * f * f);
  for (int y = 0; y < z.h; ++y) {
    for (int x = 0; x < z.w; ++x) {
      for (int dy = 0; dy < f; ++dy) {
        for (int dx = 0; dx < f; ++dx) {
          for (int c = 0; c < 3; ++c) {
            double v = img.at(x * f + dx, y * f + dy, c);
            z.at(x, y, (dy * f + dx) * 3 + c) = 2.0 * v - 1.0;
          }
        }
      }
    }
  }
  return z;
}

PseudoImage SpaceToDepthCodec::decode(const LatentTensor& z) const {
  const int f = factor_;
  require(z.c == 3 * f * f, "latent channel count does not match the codec factor");
  PseudoImage img(z.w * f, z.h * f);
  for (int y = 0; y < z.h; ++y) {
    for (int x = 0; x < z.w; ++x) {
      for (int dy = 0; dy < f; ++dy) {
        for (int dx = 0; dx < f; ++dx) {
          for (int c = 0; c < 3; ++c) {
            double v = 0.5 * (z.at(x, y, (dy * f + dx) * 3 + c) + 1.0);
            img.at(x * f + dx, y * f + dy, c) = std::clamp(v, 0.0, 1.0);
          }
        }
      }
    }
  }
  return img;
}

const LatentCodec& default_codec() {
  static const SpaceToDepthCodec codec(8);
  return codec;
}

}  // namespace streetforge
