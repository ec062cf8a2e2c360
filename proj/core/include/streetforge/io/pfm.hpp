#pragma once

#include <string>

#include "streetforge/image.hpp"

namespace streetforge {

// Grayscale PFM ("Pf"), little-endian f32, bottom-up row order per the
// format's convention.
void write_pfm(const DepthMap& depth, const std::string& path);
DepthMap read_pfm(const std::string& path);

}  // namespace streetforge
