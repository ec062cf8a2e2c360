#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace streetforge {

// Container for weight/scene files: a little-endian u64 JSON-header length,
// the JSON bytes, then a flat little-endian f32 payload.
void write_blob_file(const std::string& path, const nlohmann::json& header,
                     const std::vector<float>& payload);

std::vector<float> read_blob_file(const std::string& path, nlohmann::json& header);

}  // namespace streetforge
