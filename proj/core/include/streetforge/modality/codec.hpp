#pragma once

#include "streetforge/image.hpp"
#include "streetforge/modality/palette.hpp"

namespace streetforge {

// Depth normalization range used when packing meters into [0,1] channels.
constexpr double kDefaultDepthMax = 100.0;

// Depth -> 3-channel pseudo-image by channel replication of clamp(d/d_max).
// Invalid pixels (0.0) stay 0 in every channel.
PseudoImage encode_depth3(const DepthMap& d, double d_max = kDefaultDepthMax);

// Pseudo-image -> depth: d_max times the mean of the three channels.
DepthMap decode_depth3(const PseudoImage& img, double d_max = kDefaultDepthMax);

// Label map -> colorized pseudo-image via palette lookup.
PseudoImage encode_semantic(const SemanticMap& s, const Palette& p);

// Colorized image -> label map by nearest palette color (L2, ties to the
// lowest label).
SemanticMap decode_semantic(const PseudoImage& img, const Palette& p);

}  // namespace streetforge
