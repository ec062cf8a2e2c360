#include "streetforge/pipeline/bundle.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "../io/json_convert.hpp"
#include "streetforge/io/pfm.hpp"
#include "streetforge/io/png_io.hpp"
#include "streetforge/io/point_cloud_io.hpp"

namespace fs = std::filesystem;

namespace streetforge {

void SceneBundle::validate() const {
  require(!frames.empty(), "bundle has no frames");
  for (size_t i = 1; i < frames.size(); ++i)
    require(frames[i].timestamp > frames[i - 1].timestamp,
            "frame timestamps must strictly increase");
  for (const auto& f : frames) {
    require(f.color.width == camera.width && f.color.height == camera.height,
            "color raster size does not match the camera");
    require(f.depth.width == camera.width && f.depth.height == camera.height,
            "depth raster size does not match the camera");
    require(f.semantic.width == camera.width && f.semantic.height == camera.height,
            "semantic raster size does not match the camera");
    for (int label : f.semantic.labels)
      require(label >= 0 && label < palette.K(), "semantic label outside the palette");
  }
  palette.validate();
  require(d_max > 0, "d_max must be positive");
}

std::vector<std::pair<PointCloud, double>> SceneBundle::lidar_frames() const {
  std::vector<std::pair<PointCloud, double>> out;
  for (const auto& f : frames)
    if (f.has_lidar) out.emplace_back(f.lidar, f.timestamp);
  require(!out.empty(), "bundle has no LiDAR clouds");
  return out;
}

int SceneBundle::nearest_frame(double timestamp) const {
  require(!frames.empty(), "bundle has no frames");
  int best = 0;
  double best_d = std::abs(frames[0].timestamp - timestamp);
  for (size_t i = 1; i < frames.size(); ++i) {
    double d = std::abs(frames[i].timestamp - timestamp);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

namespace {

std::string frame_name(const char* stem, size_t index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04zu.%s", stem, index, ext);
  return buf;
}

}  // namespace

void write_bundle(const SceneBundle& bundle, const std::string& dir) {
  bundle.validate();
  fs::create_directories(dir);

  nlohmann::json manifest;
  manifest["kind"] = "scene_bundle";
  manifest["conventions"] = "camera frame x-right y-down z-forward; meters; seconds";
  manifest["camera"] = {{"fx", bundle.camera.fx}, {"fy", bundle.camera.fy},
                        {"cx", bundle.camera.cx}, {"cy", bundle.camera.cy},
                        {"width", bundle.camera.width},
                        {"height", bundle.camera.height}};
  manifest["d_max"] = bundle.d_max;
  nlohmann::json palette = nlohmann::json::array();
  for (const auto& c : bundle.palette.colors)
    palette.push_back({c.x(), c.y(), c.z()});
  manifest["palette"] = palette;
  nlohmann::json tracks = nlohmann::json::array();
  for (const auto& t : bundle.tracks) tracks.push_back(track_to_json(t));
  manifest["tracks"] = tracks;

  nlohmann::json frames = nlohmann::json::array();
  for (size_t i = 0; i < bundle.frames.size(); ++i) {
    const FrameData& f = bundle.frames[i];
    nlohmann::json jf;
    jf["timestamp"] = f.timestamp;
    jf["cam_to_world"] = pose_to_json(f.cam_to_world);
    jf["color"] = frame_name("color", i, "png");
    jf["depth"] = frame_name("depth", i, "pfm");
    jf["semantic"] = frame_name("semantic", i, "png");
    write_png_rgb(f.color, dir + "/" + frame_name("color", i, "png"));
    write_pfm(f.depth, dir + "/" + frame_name("depth", i, "pfm"));
    write_png_labels(f.semantic, dir + "/" + frame_name("semantic", i, "png"));
    if (f.has_lidar) {
      jf["lidar"] = frame_name("lidar", i, "bin");
      write_point_cloud(f.lidar, dir + "/" + frame_name("lidar", i, "bin"));
    }
    frames.push_back(jf);
  }
  manifest["frames"] = frames;

  std::ofstream out(dir + "/manifest.json");
  require(out.good(), "cannot write manifest in " + dir);
  out << manifest.dump(2) << "\n";
}

SceneBundle read_bundle(const std::string& dir) {
  std::ifstream in(dir + "/manifest.json");
  require(in.good(), "no manifest.json in " + dir);
  nlohmann::json manifest = nlohmann::json::parse(in);
  require(manifest.value("kind", "") == "scene_bundle", "not a scene bundle: " + dir);

  SceneBundle bundle;
  const auto& cam = manifest.at("camera");
  bundle.camera = CameraModel(cam.at("fx"), cam.at("fy"), cam.at("cx"),
                              cam.at("cy"), cam.at("width"), cam.at("height"));
  bundle.d_max = manifest.at("d_max").get<double>();
  for (const auto& c : manifest.at("palette"))
    bundle.palette.colors.emplace_back(c.at(0), c.at(1), c.at(2));
  for (const auto& t : manifest.at("tracks"))
    bundle.tracks.push_back(track_from_json(t));

  for (const auto& jf : manifest.at("frames")) {
    FrameData f;
    f.timestamp = jf.at("timestamp").get<double>();
    f.cam_to_world = pose_from_json(jf.at("cam_to_world"));
    f.color = read_png_rgb(dir + "/" + jf.at("color").get<std::string>());
    f.depth = read_pfm(dir + "/" + jf.at("depth").get<std::string>());
    f.semantic = read_png_labels(dir + "/" + jf.at("semantic").get<std::string>());
    if (jf.contains("lidar")) {
      f.lidar = read_point_cloud(dir + "/" + jf.at("lidar").get<std::string>());
      f.has_lidar = true;
    }
    bundle.frames.push_back(std::move(f));
  }
  bundle.validate();
  return bundle;
}

}  // namespace streetforge
