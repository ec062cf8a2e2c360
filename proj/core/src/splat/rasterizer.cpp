#include "streetforge/splat/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "streetforge/geometry/projection.hpp"
#include "streetforge/parallel.hpp"

namespace streetforge {

namespace {

constexpr int kTileSize = 16;
constexpr double kCovDilation = 0.3;
constexpr double kMaxAlpha = 0.99;
constexpr double kPowerCutoff = 16.0;   // exp(-16) ~ 1e-7: below raster noise
constexpr double kMaxConditioning = 1e8;
constexpr double kMinTransmittance = 1e-6;
constexpr double kDepthEps = 1e-6;

// R(q) for unit q = (w,x,y,z).
Eigen::Matrix3d quat_to_matrix(const Eigen::Vector4d& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Eigen::Matrix3d r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

// dR/dq_i for unit q, one 3x3 slice per component.
std::array<Eigen::Matrix3d, 4> quat_to_matrix_jacobian(const Eigen::Vector4d& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  std::array<Eigen::Matrix3d, 4> d;
  d[0] << 0, -z, y, z, 0, -x, -y, x, 0;
  d[1] << 0, y, z, y, -2 * x, -w, z, w, -2 * x;
  d[2] << -2 * y, x, w, x, 0, z, -w, z, -2 * y;
  d[3] << -2 * z, -w, x, w, -2 * z, y, x, y, 0;
  for (auto& m : d) m *= 2.0;
  return d;
}

// Left-multiplication matrix: p (x) q = L(p) q in (w,x,y,z) coordinates.
Eigen::Matrix4d quat_left_matrix(const Eigen::Quaterniond& p) {
  Eigen::Matrix4d l;
  l << p.w(), -p.x(), -p.y(), -p.z(),
       p.x(),  p.w(), -p.z(),  p.y(),
       p.y(),  p.z(),  p.w(), -p.x(),
       p.z(), -p.y(),  p.x(),  p.w();
  return l;
}

struct GaussianRef {
  int group = -1;  // -1 = static, otherwise object id
  size_t index = 0;
  const Gaussian3D* g = nullptr;
  bool dynamic = false;
  Eigen::Matrix3d track_rot = Eigen::Matrix3d::Identity();
  Eigen::Quaterniond track_quat = Eigen::Quaterniond::Identity();
  Eigen::Vector3d track_trans = Eigen::Vector3d::Zero();
};

struct Projected {
  size_t ref = 0;           // index into the flattened reference list
  Eigen::Vector2d mean2d;   // continuous pixel coords
  double z = 0;             // camera-frame depth at the mean
  double conic_a = 0, conic_b = 0, conic_c = 0;  // inverse 2D covariance
  double opacity = 0;
  Eigen::Vector3d color;
  Eigen::VectorXd probs;    // softmax(sem_logits)
  double radius = 0;
  // Forward intermediates kept for the backward chain.
  Eigen::Vector3d p_cam;
  Eigen::Matrix3d sigma_cam;
  Eigen::Matrix<double, 2, 3> jac;
  Eigen::Vector4d q_world;  // unit quaternion used for the covariance
  Eigen::Vector4d q_hat;    // normalized raw quaternion
  double q_norm = 1;
  Eigen::Vector3d scale2;   // exp(2*log_scale)
};

// Flattening order fixes the compositing tie rule: statics first, then
// object groups in ascending id, each in storage order.
std::vector<GaussianRef> flatten_scene(const GaussianScene& scene, double time) {
  std::vector<GaussianRef> refs;
  refs.reserve(scene.total_gaussians());
  for (size_t i = 0; i < scene.statics.size(); ++i)
    refs.push_back({-1, i, &scene.statics[i], false});
  for (const auto& [id, group] : scene.objects) {
    const BBoxTrack* track = scene.find_track(id);
    require(track != nullptr, "gaussian group without a track");
    Pose pose = track->pose_at(time);
    for (size_t i = 0; i < group.size(); ++i) {
      GaussianRef ref;
      ref.group = id;
      ref.index = i;
      ref.g = &group[i];
      ref.dynamic = true;
      ref.track_rot = pose.rotation().toRotationMatrix();
      ref.track_quat = pose.rotation();
      ref.track_trans = pose.translation();
      refs.push_back(ref);
    }
  }
  return refs;
}

struct ProjectedScene {
  std::vector<GaussianRef> refs;
  std::vector<Projected> splats;        // visible, in flatten order
  std::vector<size_t> sorted;           // splat indices by (z, insertion)
  int tiles_x = 0, tiles_y = 0;
  std::vector<std::vector<size_t>> tile_lists;  // sorted splat indices per tile
};

ProjectedScene project_scene(const GaussianScene& scene, const CameraModel& cam,
                             const Pose& cam_to_world, double time) {
  ProjectedScene out;
  out.refs = flatten_scene(scene, time);

  const Pose world_to_cam = invert(cam_to_world);
  const Eigen::Matrix3d r_wc = world_to_cam.rotation().toRotationMatrix();
  const Eigen::Vector3d t_wc = world_to_cam.translation();
  const int K = scene.num_classes;

  out.splats.reserve(out.refs.size());
  for (size_t i = 0; i < out.refs.size(); ++i) {
    const GaussianRef& ref = out.refs[i];
    const Gaussian3D& g = *ref.g;

    Eigen::Vector3d mean_w = ref.dynamic
                                 ? (ref.track_rot * g.mean + ref.track_trans).eval()
                                 : g.mean;
    Eigen::Vector3d p_cam = r_wc * mean_w + t_wc;
    if (p_cam.z() <= kZNear) continue;

    Projected s;
    s.ref = i;
    s.p_cam = p_cam;
    s.z = p_cam.z();
    s.mean2d = cam.project(p_cam);

    // World-frame covariance via the composed unit quaternion.
    s.q_norm = g.rotation.norm();
    Eigen::Vector4d q_raw(g.rotation.w(), g.rotation.x(), g.rotation.y(),
                          g.rotation.z());
    s.q_hat = q_raw / s.q_norm;
    Eigen::Vector4d q_world = s.q_hat;
    if (ref.dynamic) q_world = quat_left_matrix(ref.track_quat) * s.q_hat;
    s.q_world = q_world;
    Eigen::Matrix3d r_q = quat_to_matrix(q_world);
    s.scale2 = (2.0 * g.log_scale).array().exp();
    Eigen::Matrix3d sigma_w = r_q * s.scale2.asDiagonal() * r_q.transpose();
    s.sigma_cam = r_wc * sigma_w * r_wc.transpose();

    const double z = p_cam.z();
    Eigen::Matrix<double, 2, 3> jac;
    jac << cam.fx / z, 0, -cam.fx * p_cam.x() / (z * z),
           0, cam.fy / z, -cam.fy * p_cam.y() / (z * z);
    s.jac = jac;

    Eigen::Matrix2d sigma2d = jac * s.sigma_cam * jac.transpose();
    sigma2d(0, 0) += kCovDilation;
    sigma2d(1, 1) += kCovDilation;

    double det = sigma2d.determinant();
    double mid = 0.5 * (sigma2d(0, 0) + sigma2d(1, 1));
    if (det <= 0.0) continue;
    double root = std::sqrt(std::max(0.0, mid * mid - det));
    double lam_max = mid + root;
    double lam_min = mid - root;
    if (lam_min <= 0.0 || lam_max / lam_min > kMaxConditioning) continue;

    s.conic_a = sigma2d(1, 1) / det;
    s.conic_b = -sigma2d(0, 1) / det;
    s.conic_c = sigma2d(0, 0) / det;
    s.radius = std::sqrt(2.0 * kPowerCutoff * lam_max);

    // Cull splats whose cutoff footprint misses the raster.
    if (s.mean2d.x() + s.radius < 0 || s.mean2d.x() - s.radius > cam.width - 1 ||
        s.mean2d.y() + s.radius < 0 || s.mean2d.y() - s.radius > cam.height - 1)
      continue;

    s.opacity = g.opacity();
    s.color = g.color;
    require(g.sem_logits.size() == K, "sem_logits length must equal num_classes");
    Eigen::VectorXd shifted = g.sem_logits.array() - g.sem_logits.maxCoeff();
    s.probs = shifted.array().exp();
    s.probs /= s.probs.sum();

    out.splats.push_back(std::move(s));
  }

  out.sorted.resize(out.splats.size());
  std::iota(out.sorted.begin(), out.sorted.end(), 0);
  std::sort(out.sorted.begin(), out.sorted.end(), [&out](size_t a, size_t b) {
    if (out.splats[a].z != out.splats[b].z) return out.splats[a].z < out.splats[b].z;
    return out.splats[a].ref < out.splats[b].ref;
  });

  out.tiles_x = (cam.width + kTileSize - 1) / kTileSize;
  out.tiles_y = (cam.height + kTileSize - 1) / kTileSize;
  out.tile_lists.resize(static_cast<size_t>(out.tiles_x) * out.tiles_y);
  for (size_t rank = 0; rank < out.sorted.size(); ++rank) {
    const Projected& s = out.splats[out.sorted[rank]];
    int x0 = std::max(0, static_cast<int>(std::floor((s.mean2d.x() - s.radius) / kTileSize)));
    int x1 = std::min(out.tiles_x - 1, static_cast<int>(std::floor((s.mean2d.x() + s.radius) / kTileSize)));
    int y0 = std::max(0, static_cast<int>(std::floor((s.mean2d.y() - s.radius) / kTileSize)));
    int y1 = std::min(out.tiles_y - 1, static_cast<int>(std::floor((s.mean2d.y() + s.radius) / kTileSize)));
    for (int ty = y0; ty <= y1; ++ty)
      for (int tx = x0; tx <= x1; ++tx)
        out.tile_lists[static_cast<size_t>(ty) * out.tiles_x + tx].push_back(out.sorted[rank]);
  }
  return out;
}

struct Contribution {
  size_t splat;
  double alpha;
  double weight;
  double transmittance;
};

// Front-to-back compositing of one pixel. Returns the contributions when a
// collector is supplied (backward pass).
void composite_pixel(const ProjectedScene& ps, const std::vector<size_t>& list,
                     double px, double py, int K, double* color, double* depth,
                     double* sem, double* alpha_out,
                     std::vector<Contribution>* collect) {
  double transmittance = 1.0;
  double acc_color[3] = {0, 0, 0};
  double acc_z = 0, acc_w = 0;
  for (size_t idx : list) {
    const Projected& s = ps.splats[idx];
    double dx = px - s.mean2d.x();
    double dy = py - s.mean2d.y();
    double power = 0.5 * (s.conic_a * dx * dx + s.conic_c * dy * dy) +
                   s.conic_b * dx * dy;
    if (power > kPowerCutoff) continue;
    power = std::max(power, 0.0);  // PD conic; clamp rounding at the center
    double alpha = std::min(kMaxAlpha, s.opacity * std::exp(-power));
    double w = alpha * transmittance;
    acc_color[0] += w * s.color.x();
    acc_color[1] += w * s.color.y();
    acc_color[2] += w * s.color.z();
    acc_z += w * s.z;
    for (int k = 0; k < K; ++k) sem[k] += w * s.probs[k];
    acc_w += w;
    if (collect) collect->push_back({idx, alpha, w, transmittance});
    transmittance *= 1.0 - alpha;
    if (transmittance < kMinTransmittance) break;
  }
  color[0] = acc_color[0];
  color[1] = acc_color[1];
  color[2] = acc_color[2];
  *depth = acc_z / std::max(acc_w, kDepthEps);
  *alpha_out = acc_w;
}

}  // namespace

RenderOutput rasterize(const GaussianScene& scene, const CameraModel& cam,
                       const Pose& cam_to_world, double time) {
  scene.validate();
  ProjectedScene ps = project_scene(scene, cam, cam_to_world, time);
  RenderOutput out(cam.width, cam.height, scene.num_classes);
  const int K = scene.num_classes;

  parallel_for(ps.tile_lists.size(), [&](size_t tile) {
    int tx = static_cast<int>(tile) % ps.tiles_x;
    int ty = static_cast<int>(tile) / ps.tiles_x;
    const auto& list = ps.tile_lists[tile];
    for (int y = ty * kTileSize; y < std::min((ty + 1) * kTileSize, cam.height); ++y) {
      for (int x = tx * kTileSize; x < std::min((tx + 1) * kTileSize, cam.width); ++x) {
        size_t p = static_cast<size_t>(y) * cam.width + x;
        composite_pixel(ps, list, x, y, K, &out.color[p * 3], &out.depth[p],
                        &out.sem[p * K], &out.alpha[p], nullptr);
      }
    }
  });
  return out;
}

namespace {

// Per-splat accumulators gathered from pixels before the per-splat chain
// rule is applied.
struct SplatAccum {
  Eigen::Vector2d d_mean2d = Eigen::Vector2d::Zero();
  double d_conic_a = 0, d_conic_b = 0, d_conic_c = 0;
  double d_opacity = 0;  // w.r.t. opacity in (0,1)
  double d_z = 0;
  Eigen::Vector3d d_color = Eigen::Vector3d::Zero();
  Eigen::VectorXd d_probs;

  void init(int K) { d_probs = Eigen::VectorXd::Zero(K); }
  void add(const SplatAccum& o) {
    d_mean2d += o.d_mean2d;
    d_conic_a += o.d_conic_a;
    d_conic_b += o.d_conic_b;
    d_conic_c += o.d_conic_c;
    d_opacity += o.d_opacity;
    d_z += o.d_z;
    d_color += o.d_color;
    d_probs += o.d_probs;
  }
};

}  // namespace

SceneGrad rasterize_grad(const GaussianScene& scene, const CameraModel& cam,
                         const Pose& cam_to_world, double time,
                         const RenderOutput& adjoint) {
  scene.validate();
  require(adjoint.width == cam.width && adjoint.height == cam.height,
          "adjoint raster size mismatch");
  require(adjoint.num_classes == scene.num_classes, "adjoint class count mismatch");

  ProjectedScene ps = project_scene(scene, cam, cam_to_world, time);
  const int K = scene.num_classes;

  // Per-tile partials, merged in tile order below.
  std::vector<std::vector<SplatAccum>> tile_accum(ps.tile_lists.size());

  parallel_for(ps.tile_lists.size(), [&](size_t tile) {
    const auto& list = ps.tile_lists[tile];
    if (list.empty()) return;
    auto& accum = tile_accum[tile];
    accum.resize(list.size());
    for (auto& a : accum) a.init(K);
    // Local splat -> position-in-list lookup.
    std::vector<std::pair<size_t, size_t>> order(list.size());
    for (size_t i = 0; i < list.size(); ++i) order[i] = {list[i], i};
    std::sort(order.begin(), order.end());

    auto list_pos = [&order](size_t splat) {
      auto it = std::lower_bound(order.begin(), order.end(),
                                 std::make_pair(splat, size_t{0}));
      return it->second;
    };

    int tx = static_cast<int>(tile) % ps.tiles_x;
    int ty = static_cast<int>(tile) / ps.tiles_x;
    std::vector<Contribution> contribs;
    std::vector<double> sem_scratch(K);
    for (int y = ty * kTileSize; y < std::min((ty + 1) * kTileSize, cam.height); ++y) {
      for (int x = tx * kTileSize; x < std::min((tx + 1) * kTileSize, cam.width); ++x) {
        size_t p = static_cast<size_t>(y) * cam.width + x;
        contribs.clear();
        std::fill(sem_scratch.begin(), sem_scratch.end(), 0.0);
        double c[3], depth, alpha;
        composite_pixel(ps, list, x, y, K, c, &depth, sem_scratch.data(), &alpha,
                        &contribs);
        if (contribs.empty()) continue;

        const double* dL_color = &adjoint.color[p * 3];
        const double dL_depth = adjoint.depth[p];
        const double* dL_sem = &adjoint.sem[p * K];
        const double dL_alpha = adjoint.alpha[p];

        double acc_w = alpha;
        double acc_z = depth * std::max(acc_w, kDepthEps);
        double w_prime = std::max(acc_w, kDepthEps);
        // i-independent part of dL/dw_i: the alpha output plus the depth
        // normalization's dependence on total weight.
        double q = dL_alpha;
        if (acc_w > kDepthEps) q -= dL_depth * acc_z / (w_prime * w_prime);

        // dL/dw_i for each contributor, then the suffix trick for alpha.
        double suffix = 0.0;
        for (size_t ci = contribs.size(); ci-- > 0;) {
          const Contribution& cb = contribs[ci];
          const Projected& s = ps.splats[cb.splat];
          double dldw = q + dL_color[0] * s.color.x() + dL_color[1] * s.color.y() +
                        dL_color[2] * s.color.z() + dL_depth * s.z / w_prime;
          for (int k = 0; k < K; ++k) dldw += dL_sem[k] * s.probs[k];

          double d_alpha = cb.transmittance * dldw - suffix / (1.0 - cb.alpha);
          suffix += cb.weight * dldw;

          SplatAccum& acc = accum[list_pos(cb.splat)];
          // Parameter-facing contributions.
          acc.d_color += cb.weight * Eigen::Map<const Eigen::Vector3d>(dL_color);
          acc.d_z += cb.weight * dL_depth / w_prime;
          for (int k = 0; k < K; ++k) acc.d_probs[k] += cb.weight * dL_sem[k];

          // Through alpha = min(0.99, opacity * exp(-power)).
          double g_val = cb.alpha / s.opacity;  // exp(-power), pre-clamp
          if (s.opacity * g_val >= kMaxAlpha) continue;  // clamped: flat
          acc.d_opacity += g_val * d_alpha;
          double d_power = -s.opacity * g_val * d_alpha;
          double dx = x - s.mean2d.x();
          double dy = y - s.mean2d.y();
          double d_dx = d_power * (s.conic_a * dx + s.conic_b * dy);
          double d_dy = d_power * (s.conic_b * dx + s.conic_c * dy);
          acc.d_mean2d.x() -= d_dx;
          acc.d_mean2d.y() -= d_dy;
          acc.d_conic_a += d_power * 0.5 * dx * dx;
          acc.d_conic_b += d_power * dx * dy;
          acc.d_conic_c += d_power * 0.5 * dy * dy;
        }
      }
    }
  });

  // Deterministic tile-ordered merge into per-splat accumulators.
  std::vector<SplatAccum> merged(ps.splats.size());
  for (auto& m : merged) m.init(K);
  for (size_t tile = 0; tile < ps.tile_lists.size(); ++tile) {
    const auto& list = ps.tile_lists[tile];
    if (tile_accum[tile].empty()) continue;
    // Rebuild the sorted order used inside the tile.
    std::vector<std::pair<size_t, size_t>> order(list.size());
    for (size_t i = 0; i < list.size(); ++i) order[i] = {list[i], i};
    std::sort(order.begin(), order.end());
    for (size_t i = 0; i < order.size(); ++i)
      merged[order[i].first].add(tile_accum[tile][i]);
  }

  // Per-splat chain rule back to the raw Gaussian parameters.
  SceneGrad grad;
  grad.statics.resize(scene.statics.size());
  for (auto& g : grad.statics) g.sem_logits = Eigen::VectorXd::Zero(K);
  for (const auto& [id, group] : scene.objects) {
    grad.objects[id].resize(group.size());
    for (auto& g : grad.objects[id]) g.sem_logits = Eigen::VectorXd::Zero(K);
  }

  const Pose world_to_cam = invert(cam_to_world);
  const Eigen::Matrix3d r_wc = world_to_cam.rotation().toRotationMatrix();

  parallel_for(ps.splats.size(), [&](size_t si) {
    const Projected& s = ps.splats[si];
    const SplatAccum& acc = merged[si];
    const GaussianRef& ref = ps.refs[s.ref];
    GaussianGrad& out = ref.group == kStaticObjectId
                            ? grad.statics[ref.index]
                            : grad.objects.at(ref.group)[ref.index];

    // Color and semantics.
    out.color += acc.d_color;
    Eigen::VectorXd dp = acc.d_probs;
    double dot = s.probs.dot(dp);
    out.sem_logits += s.probs.cwiseProduct(dp - Eigen::VectorXd::Constant(K, dot));

    // Opacity logit.
    out.opacity_logit += acc.d_opacity * s.opacity * (1.0 - s.opacity);

    // Conic -> 2D covariance (dSigma^{-1} = -Sigma^{-1} dSigma Sigma^{-1}).
    Eigen::Matrix2d conic;
    conic << s.conic_a, s.conic_b, s.conic_b, s.conic_c;
    Eigen::Matrix2d d_conic_mat;
    d_conic_mat << acc.d_conic_a, 0.5 * acc.d_conic_b, 0.5 * acc.d_conic_b,
        acc.d_conic_c;
    Eigen::Matrix2d d_sigma2d = -conic * d_conic_mat * conic;

    // Sigma2D = J Sigma_cam J^T + dilation*I.
    Eigen::Matrix3d d_sigma_cam =
        s.jac.transpose() * d_sigma2d * s.jac;
    Eigen::Matrix<double, 2, 3> d_jac =
        2.0 * d_sigma2d * s.jac * s.sigma_cam;

    // Sigma_cam = R_wc Sigma_world R_wc^T.
    Eigen::Matrix3d d_sigma_w = r_wc.transpose() * d_sigma_cam * r_wc;

    // Sigma_world = R(q_world) diag(scale2) R(q_world)^T.
    Eigen::Matrix3d r_q = quat_to_matrix(s.q_world);
    Eigen::Matrix3d d_rq = 2.0 * d_sigma_w * r_q * s.scale2.asDiagonal();
    Eigen::Vector3d d_scale2 = (r_q.transpose() * d_sigma_w * r_q).diagonal();
    out.log_scale += (2.0 * s.scale2.array() * d_scale2.array()).matrix();

    // Rotation: through R(q_world), the track composition and the raw-norm
    // normalization.
    auto jac_r = quat_to_matrix_jacobian(s.q_world);
    Eigen::Vector4d d_qworld;
    for (int i = 0; i < 4; ++i)
      d_qworld[i] = (jac_r[i].array() * d_rq.array()).sum();
    Eigen::Vector4d d_qhat = ref.dynamic
        ? (quat_left_matrix(ref.track_quat).transpose() * d_qworld).eval()
        : d_qworld;
    Eigen::Matrix4d norm_jac =
        (Eigen::Matrix4d::Identity() - s.q_hat * s.q_hat.transpose()) / s.q_norm;
    out.rotation += norm_jac * d_qhat;

    // Mean: through the projected center, the camera depth and J.
    Eigen::Vector3d d_pcam = s.jac.transpose() * acc.d_mean2d;
    d_pcam.z() += acc.d_z;
    const double z = s.p_cam.z();
    const double inv_z2 = 1.0 / (z * z);
    d_pcam.x() += d_jac(0, 2) * (-cam.fx * inv_z2);
    d_pcam.y() += d_jac(1, 2) * (-cam.fy * inv_z2);
    d_pcam.z() += d_jac(0, 0) * (-cam.fx * inv_z2) + d_jac(1, 1) * (-cam.fy * inv_z2) +
                  d_jac(0, 2) * (2.0 * cam.fx * s.p_cam.x() / (z * z * z)) +
                  d_jac(1, 2) * (2.0 * cam.fy * s.p_cam.y() / (z * z * z));
    Eigen::Vector3d d_mean_w = r_wc.transpose() * d_pcam;
    out.mean += ref.dynamic ? (ref.track_rot.transpose() * d_mean_w).eval()
                            : d_mean_w;
  });

  return grad;
}

}  // namespace streetforge
