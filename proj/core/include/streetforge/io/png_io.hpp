#pragma once

#include <string>

#include "streetforge/image.hpp"
#include "streetforge/modality/palette.hpp"

namespace streetforge {

// 8-bit RGB; [0,1] values are rounded to bytes on write.
void write_png_rgb(const PseudoImage& img, const std::string& path);
PseudoImage read_png_rgb(const std::string& path);

// Label maps as single-channel 8-bit PNG (grayscale of raw label indices).
void write_png_labels(const SemanticMap& map, const std::string& path);

// Label maps as indexed-color PNG: the pixel byte is the label, the PLTE
// chunk carries the palette so viewers show class colors.
void write_png_indexed(const SemanticMap& map, const Palette& palette,
                       const std::string& path);

// Reads raw label indices from either grayscale or indexed-color PNGs.
SemanticMap read_png_labels(const std::string& path);

}  // namespace streetforge
