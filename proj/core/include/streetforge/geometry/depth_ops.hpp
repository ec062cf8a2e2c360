#pragma once

#include <tuple>

#include "streetforge/geometry/projection.hpp"
#include "streetforge/image.hpp"

namespace streetforge {

// Per-pixel linear index of the Euclidean-nearest valid pixel (a valid
// pixel maps to itself). Ties go to the smaller column, then the smaller
// row. Errors when no pixel is valid.
std::vector<int32_t> nearest_valid_index_map(const SparseMap& sparse);

// Fills every invalid pixel with the value of the Euclidean-nearest valid
// pixel (ties toward the smaller column, then the smaller row), then runs
// one 5x5 median pass over the originally-invalid pixels. Originally-valid
// pixels come through unchanged.
DepthMap densify_depth(const SparseMap& sparse);

struct DepthAlignment {
  double a = 1.0;  // scale
  double b = 0.0;  // shift
  DepthMap aligned;
};

// Least-squares (a, b) minimizing sum over valid LiDAR pixels of
// (a*dense + b - lidar)^2; aligned = max(0, a*dense + b).
DepthAlignment align_depth_lsq(const DepthMap& dense, const SparseMap& sparse_lidar);

}  // namespace streetforge
