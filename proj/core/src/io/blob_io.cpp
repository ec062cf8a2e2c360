#include "streetforge/io/blob_io.hpp"

#include <cstdint>
#include <fstream>

#include "streetforge/common.hpp"

namespace streetforge {

static_assert(sizeof(float) == 4, "f32 payloads assume 4-byte float");

void write_blob_file(const std::string& path, const nlohmann::json& header,
                     const std::vector<float>& payload) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for write: " + path);
  std::string json = header.dump();
  uint64_t len = json.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(json.data(), static_cast<std::streamsize>(json.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(float)));
  require(out.good(), "write failed: " + path);
}

std::vector<float> read_blob_file(const std::string& path, nlohmann::json& header) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open: " + path);
  uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  require(in.good() && len < (1ULL << 30), "malformed blob header: " + path);
  std::string json(len, '\0');
  in.read(json.data(), static_cast<std::streamsize>(len));
  require(in.good(), "truncated blob header: " + path);
  header = nlohmann::json::parse(json);

  std::vector<float> payload;
  in.seekg(0, std::ios::end);
  std::streamoff end = in.tellg();
  std::streamoff data_begin = static_cast<std::streamoff>(sizeof(len) + len);
  require((end - data_begin) % 4 == 0, "payload not f32-aligned: " + path);
  payload.resize(static_cast<size_t>((end - data_begin) / 4));
  in.seekg(data_begin);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size() * sizeof(float)));
  require(in.good(), "truncated blob payload: " + path);
  return payload;
}

}  // namespace streetforge
