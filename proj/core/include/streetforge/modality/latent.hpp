#pragma once

#include <memory>

#include "streetforge/image.hpp"

namespace streetforge {

// Pixel-space <-> latent-space codec. The diffusion core only ever sees
// latents, so swapping this interface swaps the whole representation.
class LatentCodec {
 public:
  virtual ~LatentCodec() = default;
  virtual int spatial_factor() const = 0;
  virtual int latent_channels() const = 0;
  virtual LatentTensor encode(const PseudoImage& img) const = 0;
  virtual PseudoImage decode(const LatentTensor& z) const = 0;
};

// Lossless default: factor-8 space-to-depth. An HxW 3-channel image becomes
// an (H/8, W/8, 192) latent; values are remapped [0,1] -> [-1,1] via 2x-1.
// Exactly invertible for in-range images, so every diffusion-space test can
// assert equality instead of tolerance.
class SpaceToDepthCodec final : public LatentCodec {
 public:
  explicit SpaceToDepthCodec(int factor = 8) : factor_(factor) {}

  int spatial_factor() const override { return factor_; }
  int latent_channels() const override { return 3 * factor_ * factor_; }
  LatentTensor encode(const PseudoImage& img) const override;
  PseudoImage decode(const LatentTensor& z) const override;

 private:
  int factor_;
};

// Module-level default codec (factor 8), shared by the conditioning and
// pipeline layers.
const LatentCodec& default_codec();

inline LatentTensor latent_encode(const PseudoImage& img) {
  return default_codec().encode(img);
}

inline PseudoImage latent_decode(const LatentTensor& z) {
  return default_codec().decode(z);
}

}  // namespace streetforge
