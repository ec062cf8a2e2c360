#include "streetforge/io/point_cloud_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "json_convert.hpp"

namespace streetforge {

namespace {

constexpr size_t kRecordSize = 3 * 4 + 3 + 4;  // f32 xyz, u8 rgb, i32 id

void pack_records(const PointCloud& cloud, std::vector<char>& out) {
  out.reserve(out.size() + cloud.size() * kRecordSize);
  for (size_t i = 0; i < cloud.size(); ++i) {
    char rec[kRecordSize];
    float xyz[3] = {static_cast<float>(cloud.positions[i].x()),
                    static_cast<float>(cloud.positions[i].y()),
                    static_cast<float>(cloud.positions[i].z())};
    std::memcpy(rec, xyz, 12);
    for (int c = 0; c < 3; ++c) {
      double v = std::clamp(cloud.colors[i][c], 0.0, 1.0);
      rec[12 + c] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
    }
    int32_t id = cloud.object_ids[i];
    std::memcpy(rec + 15, &id, 4);
    out.insert(out.end(), rec, rec + kRecordSize);
  }
}

PointCloud unpack_records(const char* data, size_t count) {
  PointCloud cloud;
  cloud.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    const char* rec = data + i * kRecordSize;
    float xyz[3];
    std::memcpy(xyz, rec, 12);
    Eigen::Vector3d color(static_cast<unsigned char>(rec[12]) / 255.0,
                          static_cast<unsigned char>(rec[13]) / 255.0,
                          static_cast<unsigned char>(rec[14]) / 255.0);
    int32_t id;
    std::memcpy(&id, rec + 15, 4);
    cloud.push(Eigen::Vector3d(xyz[0], xyz[1], xyz[2]), color, id);
  }
  return cloud;
}

}  // namespace

void write_point_cloud(const PointCloud& cloud, const std::string& path) {
  cloud.validate();
  std::vector<char> bytes;
  pack_records(cloud, bytes);
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for write: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(out.good(), "write failed: " + path);
}

PointCloud read_point_cloud(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  require(in.good(), "cannot open: " + path);
  std::streamoff size = in.tellg();
  require(size % kRecordSize == 0, "point file size is not a whole record count: " + path);
  std::vector<char> bytes(static_cast<size_t>(size));
  in.seekg(0);
  in.read(bytes.data(), size);
  require(in.good(), "read failed: " + path);
  return unpack_records(bytes.data(), bytes.size() / kRecordSize);
}

void write_fused_scene(const FusedScene& scene, const std::string& path) {
  scene.validate();
  nlohmann::json header;
  header["kind"] = "fused_scene";
  header["static_count"] = scene.static_world.size();
  nlohmann::json objs = nlohmann::json::array();
  for (const auto& [id, cloud] : scene.objects)
    objs.push_back({{"object_id", id}, {"count", cloud.size()}});
  header["objects"] = objs;
  nlohmann::json tracks = nlohmann::json::array();
  for (const auto& t : scene.tracks) tracks.push_back(track_to_json(t));
  header["tracks"] = tracks;

  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for write: " + path);
  std::string json = header.dump();
  uint64_t len = json.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(json.data(), static_cast<std::streamsize>(json.size()));

  std::vector<char> bytes;
  pack_records(scene.static_world, bytes);
  for (const auto& [id, cloud] : scene.objects) pack_records(cloud, bytes);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(out.good(), "write failed: " + path);
}

FusedScene read_fused_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open: " + path);
  uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  require(in.good() && len < (1ULL << 30), "malformed fused scene: " + path);
  std::string json(len, '\0');
  in.read(json.data(), static_cast<std::streamsize>(len));
  require(in.good(), "truncated fused scene header: " + path);
  nlohmann::json header = nlohmann::json::parse(json);
  require(header.value("kind", "") == "fused_scene", "not a fused scene: " + path);

  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  require(bytes.size() % kRecordSize == 0, "truncated fused scene records: " + path);

  FusedScene scene;
  for (const auto& t : header.at("tracks")) scene.tracks.push_back(track_from_json(t));
  size_t offset = 0;
  auto take = [&](size_t count) {
    require((offset + count) * kRecordSize <= bytes.size(),
            "fused scene record count mismatch: " + path);
    PointCloud c = unpack_records(bytes.data() + offset * kRecordSize, count);
    offset += count;
    return c;
  };
  scene.static_world = take(header.at("static_count").get<size_t>());
  for (const auto& o : header.at("objects"))
    scene.objects[o.at("object_id").get<int>()] = take(o.at("count").get<size_t>());
  scene.validate();
  return scene;
}

}  // namespace streetforge
