#pragma once

#include <Eigen/Dense>
#include <vector>

#include "streetforge/common.hpp"
#include "streetforge/geometry/pose.hpp"

namespace streetforge {

constexpr int kStaticObjectId = -1;

// Parallel-array point cloud: positions in meters, per-point RGB in [0,1],
// and an object id (-1 = static background).
struct PointCloud {
  std::vector<Eigen::Vector3d> positions;
  std::vector<Eigen::Vector3d> colors;
  std::vector<int> object_ids;

  size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }

  void reserve(size_t n) {
    positions.reserve(n);
    colors.reserve(n);
    object_ids.reserve(n);
  }

  void push(const Eigen::Vector3d& p, const Eigen::Vector3d& rgb, int id) {
    positions.push_back(p);
    colors.push_back(rgb);
    object_ids.push_back(id);
  }

  void append(const PointCloud& other) {
    positions.insert(positions.end(), other.positions.begin(), other.positions.end());
    colors.insert(colors.end(), other.colors.begin(), other.colors.end());
    object_ids.insert(object_ids.end(), other.object_ids.begin(), other.object_ids.end());
  }

  void validate() const {
    require(colors.size() == positions.size() && object_ids.size() == positions.size(),
            "point cloud parallel arrays must have equal length");
    for (const auto& p : positions)
      require(p.allFinite(), "point positions must be finite");
  }
};

// Rigidly transforms positions; colors and ids are carried through.
PointCloud transform_points(const PointCloud& cloud, const Pose& pose);

}  // namespace streetforge
