#pragma once

#include <string>

#include "streetforge/geometry/fused_scene.hpp"

namespace streetforge {

// Packed little-endian records [f32 x, f32 y, f32 z, u8 r, u8 g, u8 b,
// i32 object_id], no padding; the count is implied by the file size.
void write_point_cloud(const PointCloud& cloud, const std::string& path);
PointCloud read_point_cloud(const std::string& path);

// Fused scene: little-endian u64 JSON-header length + JSON (group counts,
// tracks), then packed point records as above — static cloud first, then
// objects by ascending id.
void write_fused_scene(const FusedScene& scene, const std::string& path);
FusedScene read_fused_scene(const std::string& path);

}  // namespace streetforge
