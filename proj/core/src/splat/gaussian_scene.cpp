#include "streetforge/splat/gaussian_scene.hpp"

#include <algorithm>
#include <limits>

#include <nlohmann/json.hpp>

#include "../io/json_convert.hpp"
#include "streetforge/io/blob_io.hpp"
#include "streetforge/parallel.hpp"

namespace streetforge {

namespace {

// Mean distance to the 3 nearest other points (fewer when the set is small).
std::vector<double> knn3_mean_distance(const std::vector<Eigen::Vector3d>& pts) {
  const size_t n = pts.size();
  std::vector<double> out(n, 0.0);
  parallel_for(n, [&](size_t i) {
    double best[3] = {std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity()};
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double d2 = (pts[i] - pts[j]).squaredNorm();
      if (d2 < best[2]) {
        best[2] = d2;
        if (best[2] < best[1]) std::swap(best[1], best[2]);
        if (best[1] < best[0]) std::swap(best[0], best[1]);
      }
    }
    double acc = 0.0;
    int cnt = 0;
    for (double b : best) {
      if (std::isfinite(b)) {
        acc += std::sqrt(b);
        ++cnt;
      }
    }
    out[i] = cnt > 0 ? acc / cnt : 0.0;
  });
  return out;
}

std::vector<Gaussian3D> seed_group(const PointCloud& cloud, int stride,
                                   int num_classes) {
  std::vector<Eigen::Vector3d> kept_pos;
  std::vector<Eigen::Vector3d> kept_color;
  for (size_t i = 0; i < cloud.size(); i += stride) {
    kept_pos.push_back(cloud.positions[i]);
    kept_color.push_back(cloud.colors[i]);
  }
  std::vector<double> nn = knn3_mean_distance(kept_pos);

  std::vector<Gaussian3D> group(kept_pos.size());
  for (size_t i = 0; i < kept_pos.size(); ++i) {
    Gaussian3D& g = group[i];
    g.mean = kept_pos[i];
    g.color = kept_color[i];
    double s = std::max(nn[i], 0.05);
    g.log_scale = Eigen::Vector3d::Constant(std::log(s));
    g.opacity_logit = 0.0;
    g.sem_logits = Eigen::VectorXd::Zero(num_classes);
  }
  return group;
}

}  // namespace

GaussianScene init_from_cloud(const FusedScene& scene, int stride, int num_classes) {
  require(stride >= 1, "stride must be >= 1");
  require(num_classes >= 1, "need at least one semantic class");

  GaussianScene out;
  out.num_classes = num_classes;
  out.tracks = scene.tracks;
  out.statics = seed_group(scene.static_world, stride, num_classes);
  for (const auto& [id, cloud] : scene.objects) {
    auto group = seed_group(cloud, stride, num_classes);
    if (!group.empty()) out.objects[id] = std::move(group);
  }
  require(out.total_gaussians() > 0, "no gaussians");
  return out;
}

namespace {

constexpr int kFixedFields = 14;  // mean3 log_scale3 rot4 opacity1 color3

void pack_group(const std::vector<Gaussian3D>& group, int K,
                std::vector<float>& payload) {
  for (const auto& g : group) {
    auto put3 = [&payload](const Eigen::Vector3d& v) {
      payload.push_back(static_cast<float>(v.x()));
      payload.push_back(static_cast<float>(v.y()));
      payload.push_back(static_cast<float>(v.z()));
    };
    put3(g.mean);
    put3(g.log_scale);
    payload.push_back(static_cast<float>(g.rotation.w()));
    payload.push_back(static_cast<float>(g.rotation.x()));
    payload.push_back(static_cast<float>(g.rotation.y()));
    payload.push_back(static_cast<float>(g.rotation.z()));
    payload.push_back(static_cast<float>(g.opacity_logit));
    put3(g.color);
    for (int k = 0; k < K; ++k)
      payload.push_back(static_cast<float>(g.sem_logits[k]));
  }
}

std::vector<Gaussian3D> unpack_group(const std::vector<float>& payload,
                                     size_t& off, size_t count, int K) {
  std::vector<Gaussian3D> group(count);
  for (auto& g : group) {
    auto take3 = [&payload, &off]() {
      Eigen::Vector3d v(payload[off], payload[off + 1], payload[off + 2]);
      off += 3;
      return v;
    };
    g.mean = take3();
    g.log_scale = take3();
    g.rotation = Eigen::Quaterniond(payload[off], payload[off + 1],
                                    payload[off + 2], payload[off + 3]);
    off += 4;
    g.opacity_logit = payload[off++];
    g.color = take3();
    g.sem_logits = Eigen::VectorXd(K);
    for (int k = 0; k < K; ++k) g.sem_logits[k] = payload[off++];
  }
  return group;
}

}  // namespace

void save_gaussian_scene(const GaussianScene& scene, const std::string& path) {
  const int K = scene.num_classes;
  nlohmann::json header;
  header["kind"] = "gaussian_scene";
  header["num_classes"] = K;
  header["field_layout"] = "mean3 log_scale3 rotation_wxyz4 opacity_logit1 color3 sem_logitsK";
  header["static_count"] = scene.statics.size();
  nlohmann::json objs = nlohmann::json::array();
  for (const auto& [id, group] : scene.objects)
    objs.push_back({{"object_id", id}, {"count", group.size()}});
  header["objects"] = objs;
  nlohmann::json tracks = nlohmann::json::array();
  for (const auto& t : scene.tracks) tracks.push_back(track_to_json(t));
  header["tracks"] = tracks;

  std::vector<float> payload;
  payload.reserve(scene.total_gaussians() * (kFixedFields + K));
  pack_group(scene.statics, K, payload);
  for (const auto& [id, group] : scene.objects) pack_group(group, K, payload);
  write_blob_file(path, header, payload);
}

GaussianScene load_gaussian_scene(const std::string& path) {
  nlohmann::json header;
  std::vector<float> payload = read_blob_file(path, header);
  require(header.value("kind", "") == "gaussian_scene", "not a gaussian_scene file");

  GaussianScene scene;
  scene.num_classes = header.at("num_classes").get<int>();
  for (const auto& t : header.at("tracks")) scene.tracks.push_back(track_from_json(t));

  size_t off = 0;
  scene.statics = unpack_group(payload, off,
                               header.at("static_count").get<size_t>(),
                               scene.num_classes);
  for (const auto& o : header.at("objects")) {
    int id = o.at("object_id").get<int>();
    scene.objects[id] =
        unpack_group(payload, off, o.at("count").get<size_t>(), scene.num_classes);
  }
  require(off == payload.size(), "gaussian payload size mismatch");
  scene.validate();
  return scene;
}

}  // namespace streetforge
