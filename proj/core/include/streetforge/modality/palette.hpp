#pragma once

#include <Eigen/Dense>
#include <vector>

#include "streetforge/common.hpp"

namespace streetforge {

// Semantic class colors. Decoding matches by nearest neighbor, so the
// pairwise separation delta is what makes the round trip exact.
struct Palette {
  std::vector<Eigen::Vector3d> colors;  // RGB in [0,1]

  int K() const { return static_cast<int>(colors.size()); }

  double min_pairwise_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < colors.size(); ++i)
      for (size_t j = i + 1; j < colors.size(); ++j)
        best = std::min(best, (colors[i] - colors[j]).norm());
    return colors.size() < 2 ? std::numeric_limits<double>::infinity() : best;
  }

  void validate() const {
    require(!colors.empty(), "palette needs at least one color");
    for (const auto& c : colors)
      require(c.minCoeff() >= 0.0 && c.maxCoeff() <= 1.0,
              "palette colors must lie in [0,1]");
    require(min_pairwise_distance() > 0.0, "palette colors must be distinct");
  }
};

// Fixed maximally-separated palette for K <= 32 classes; identical across
// runs so persisted label maps stay decodable. Guarantees pairwise L2
// separation >= 0.25.
Palette default_palette(int K);

}  // namespace streetforge
