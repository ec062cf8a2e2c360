#include "streetforge/splat/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "streetforge/adam.hpp"
#include "streetforge/rng.hpp"

namespace streetforge {

namespace {

// All mutable state flattened per field across the scene, statics first and
// then object groups in ascending id (the rasterizer's flatten order).
struct FlatParams {
  std::vector<std::pair<int, size_t>> groups;  // (group id, count), -1 = static
  int K = 1;
  Eigen::VectorXd mean, log_scale, rotation, opacity, color, sem;

  size_t count() const {
    size_t n = 0;
    for (const auto& [id, c] : groups) n += c;
    return n;
  }
};

FlatParams gather(const GaussianScene& scene) {
  FlatParams fp;
  fp.K = scene.num_classes;
  size_t n = scene.total_gaussians();
  fp.mean.resize(3 * n);
  fp.log_scale.resize(3 * n);
  fp.rotation.resize(4 * n);
  fp.opacity.resize(n);
  fp.color.resize(3 * n);
  fp.sem.resize(static_cast<Eigen::Index>(fp.K) * n);

  size_t i = 0;
  auto put_group = [&](int id, const std::vector<Gaussian3D>& group) {
    fp.groups.emplace_back(id, group.size());
    for (const auto& g : group) {
      fp.mean.segment<3>(3 * i) = g.mean;
      fp.log_scale.segment<3>(3 * i) = g.log_scale;
      fp.rotation.segment<4>(4 * i) =
          Eigen::Vector4d(g.rotation.w(), g.rotation.x(), g.rotation.y(), g.rotation.z());
      fp.opacity[i] = g.opacity_logit;
      fp.color.segment<3>(3 * i) = g.color;
      fp.sem.segment(static_cast<Eigen::Index>(fp.K) * i, fp.K) = g.sem_logits;
      ++i;
    }
  };
  put_group(kStaticObjectId, scene.statics);
  for (const auto& [id, group] : scene.objects) put_group(id, group);
  return fp;
}

void scatter(const FlatParams& fp, GaussianScene& scene) {
  size_t i = 0;
  auto take_group = [&](std::vector<Gaussian3D>& group, size_t count) {
    group.resize(count);
    for (auto& g : group) {
      g.mean = fp.mean.segment<3>(3 * i);
      g.log_scale = fp.log_scale.segment<3>(3 * i);
      Eigen::Vector4d q = fp.rotation.segment<4>(4 * i);
      g.rotation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);
      g.opacity_logit = fp.opacity[i];
      g.color = fp.color.segment<3>(3 * i);
      g.sem_logits = fp.sem.segment(static_cast<Eigen::Index>(fp.K) * i, fp.K);
      ++i;
    }
  };
  for (const auto& [id, count] : fp.groups) {
    if (id == kStaticObjectId) {
      take_group(scene.statics, count);
    } else {
      take_group(scene.objects[id], count);
    }
  }
}

// SceneGrad in the same flat layout.
struct FlatGrad {
  Eigen::VectorXd mean, log_scale, rotation, opacity, color, sem;
};

FlatGrad flatten_grad(const SceneGrad& grad, const FlatParams& fp) {
  size_t n = fp.count();
  FlatGrad fg;
  fg.mean = Eigen::VectorXd::Zero(3 * n);
  fg.log_scale = Eigen::VectorXd::Zero(3 * n);
  fg.rotation = Eigen::VectorXd::Zero(4 * n);
  fg.opacity = Eigen::VectorXd::Zero(n);
  fg.color = Eigen::VectorXd::Zero(3 * n);
  fg.sem = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fp.K) * n);

  size_t i = 0;
  auto put = [&](const std::vector<GaussianGrad>& group) {
    for (const auto& g : group) {
      fg.mean.segment<3>(3 * i) = g.mean;
      fg.log_scale.segment<3>(3 * i) = g.log_scale;
      fg.rotation.segment<4>(4 * i) = g.rotation;
      fg.opacity[i] = g.opacity_logit;
      fg.color.segment<3>(3 * i) = g.color;
      fg.sem.segment(static_cast<Eigen::Index>(fp.K) * i, fp.K) = g.sem_logits;
      ++i;
    }
  };
  for (const auto& [id, count] : fp.groups) {
    (void)count;
    if (id == kStaticObjectId) {
      put(grad.statics);
    } else {
      put(grad.objects.at(id));
    }
  }
  return fg;
}

struct FieldOptimizers {
  Adam mean, log_scale, rotation, opacity, color, sem;

  explicit FieldOptimizers(const OptimizeConfig& cfg)
      : mean(cfg.lr_mean),
        log_scale(cfg.lr_scale),
        rotation(cfg.lr_rotation),
        opacity(cfg.lr_opacity),
        color(cfg.lr_color),
        sem(cfg.lr_sem) {}
};

// Component-expanded old->new mapping for Adam state.
std::vector<Eigen::Index> expand_map(const std::vector<Eigen::Index>& per_gaussian,
                                     int m) {
  std::vector<Eigen::Index> out(per_gaussian.size() * m);
  for (size_t i = 0; i < per_gaussian.size(); ++i)
    for (int c = 0; c < m; ++c)
      out[i * m + c] = per_gaussian[i] < 0 ? -1 : per_gaussian[i] * m + c;
  return out;
}

}  // namespace

GaussianScene optimize(GaussianScene scene, const std::vector<RealView>& real_views,
                       const std::vector<VirtualView>& virtual_views,
                       const OptimizeConfig& cfg, OptimizeTrace* trace) {
  require(!real_views.empty(), "need at least one real view");
  require(cfg.theta >= 0.0 && cfg.theta <= 1.0, "theta must be in [0,1]");
  require(cfg.theta == 0.0 || !virtual_views.empty(),
          "theta > 0 requires virtual views");
  scene.validate();

  FlatParams fp = gather(scene);
  FieldOptimizers opt(cfg);
  PerceptualLoss perceptual =
      cfg.perceptual ? *cfg.perceptual : default_perceptual_loss();

  Rng pick_rng(cfg.seed, 0);
  Rng jitter_rng(cfg.seed, 1);

  // Mean-gradient norms accumulated since the last maintenance pass.
  size_t n = fp.count();
  std::vector<double> grad_norm_acc(n, 0.0);

  for (int iter = 0; iter < cfg.iters; ++iter) {
    scatter(fp, scene);

    bool use_virtual = pick_rng.uniform() < cfg.theta;
    LossResult loss;
    const CameraModel* cam;
    const Pose* pose;
    double time;
    if (use_virtual) {
      const VirtualView& v =
          virtual_views[pick_rng.uniform_index(virtual_views.size())];
      cam = &v.cam;
      pose = &v.cam_to_world;
      time = v.time;
      RenderOutput render = rasterize(scene, v.cam, v.cam_to_world, v.time);
      loss = loss_virtual(render, v.color, v.depth, v.sem, cfg.weights.v_color,
                          cfg.weights.v_depth, cfg.weights.v_sem, perceptual);
      if (trace) ++trace->virtual_picks;
    } else {
      const RealView& r = real_views[pick_rng.uniform_index(real_views.size())];
      cam = &r.cam;
      pose = &r.cam_to_world;
      time = r.time;
      RenderOutput render = rasterize(scene, r.cam, r.cam_to_world, r.time);
      loss = loss_input(render, r.color, r.depth, cfg.weights.l1,
                        cfg.weights.ssim, cfg.weights.depth);
      if (trace) ++trace->real_picks;
    }

    if (!std::isfinite(loss.value))
      throw NumericalError("non-finite loss at iteration " + std::to_string(iter));
    if (trace) trace->loss.push_back(loss.value);

    SceneGrad grad = rasterize_grad(scene, *cam, *pose, time, loss.adjoint);
    FlatGrad fg = flatten_grad(grad, fp);

    opt.mean.step(fp.mean, fg.mean);
    opt.log_scale.step(fp.log_scale, fg.log_scale);
    opt.rotation.step(fp.rotation, fg.rotation);
    opt.opacity.step(fp.opacity, fg.opacity);
    opt.color.step(fp.color, fg.color);
    opt.sem.step(fp.sem, fg.sem);

    // Keep quaternions unit after every step.
    for (size_t i = 0; i < n; ++i) {
      double norm = fp.rotation.segment<4>(4 * i).norm();
      if (norm > 1e-12) fp.rotation.segment<4>(4 * i) /= norm;
    }

    for (size_t i = 0; i < n; ++i)
      grad_norm_acc[i] += fg.mean.segment<3>(3 * i).norm();

    // Maintenance: prune faint Gaussians, clone high-gradient ones.
    if (cfg.densify && cfg.densify_interval > 0 &&
        (iter + 1) % cfg.densify_interval == 0 && iter + 1 < cfg.iters) {
      std::vector<double> sorted_norms = grad_norm_acc;
      std::sort(sorted_norms.begin(), sorted_norms.end());
      double p99 = sorted_norms[static_cast<size_t>(
          std::lround(cfg.clone_percentile * (sorted_norms.size() - 1)))];

      // Per-gaussian verdicts in flat order.
      std::vector<int> verdict(n);  // 0 keep, 1 prune, 2 clone
      for (size_t i = 0; i < n; ++i) {
        double op = 1.0 / (1.0 + std::exp(-fp.opacity[i]));
        if (op < cfg.prune_opacity) {
          verdict[i] = 1;
        } else if (grad_norm_acc[i] > p99) {
          verdict[i] = 2;
        }
      }

      // New flat order: per group, survivors then that group's clones.
      std::vector<Eigen::Index> old_of_new;
      std::vector<std::pair<int, size_t>> new_groups;
      size_t base = 0;
      for (const auto& [id, count] : fp.groups) {
        size_t kept = 0;
        for (size_t i = 0; i < count; ++i)
          if (verdict[base + i] != 1) {
            old_of_new.push_back(static_cast<Eigen::Index>(base + i));
            ++kept;
          }
        if (kept == 0 && count > 0) {
          // Never drop a whole group; keep its strongest member.
          size_t best = base;
          for (size_t i = 1; i < count; ++i)
            if (fp.opacity[base + i] > fp.opacity[best]) best = base + i;
          old_of_new.push_back(static_cast<Eigen::Index>(best));
          ++kept;
        }
        size_t clones = 0;
        for (size_t i = 0; i < count; ++i)
          if (verdict[base + i] == 2) {
            old_of_new.push_back(static_cast<Eigen::Index>(base + i));
            ++clones;
          }
        new_groups.emplace_back(id, kept + clones);
        base += count;
      }

      size_t n2 = old_of_new.size();
      FlatParams fp2;
      fp2.groups = std::move(new_groups);
      fp2.K = fp.K;
      fp2.mean.resize(3 * n2);
      fp2.log_scale.resize(3 * n2);
      fp2.rotation.resize(4 * n2);
      fp2.opacity.resize(n2);
      fp2.color.resize(3 * n2);
      fp2.sem.resize(static_cast<Eigen::Index>(fp.K) * n2);

      std::vector<bool> seen(n, false);
      for (size_t j = 0; j < n2; ++j) {
        Eigen::Index src = old_of_new[j];
        fp2.mean.segment<3>(3 * j) = fp.mean.segment<3>(3 * src);
        fp2.log_scale.segment<3>(3 * j) = fp.log_scale.segment<3>(3 * src);
        fp2.rotation.segment<4>(4 * j) = fp.rotation.segment<4>(4 * src);
        fp2.opacity[j] = fp.opacity[src];
        fp2.color.segment<3>(3 * j) = fp.color.segment<3>(3 * src);
        fp2.sem.segment(static_cast<Eigen::Index>(fp.K) * j, fp.K) =
            fp.sem.segment(static_cast<Eigen::Index>(fp.K) * src, fp.K);
        bool is_clone = seen[src];
        seen[src] = true;
        if (is_clone) {
          // Jitter the copy by half its scale per axis.
          for (int c = 0; c < 3; ++c) {
            double s = std::exp(fp.log_scale[3 * src + c]);
            fp2.mean[3 * j + c] += 0.5 * s * jitter_rng.normal();
          }
        }
      }

      // Adam moments follow; clones start fresh.
      std::vector<Eigen::Index> adam_map = old_of_new;
      {
        std::vector<bool> seen2(n, false);
        for (size_t j = 0; j < n2; ++j) {
          Eigen::Index src = old_of_new[j];
          if (seen2[src]) adam_map[j] = -1;
          seen2[src] = true;
        }
      }
      opt.mean.reindex(expand_map(adam_map, 3));
      opt.log_scale.reindex(expand_map(adam_map, 3));
      opt.rotation.reindex(expand_map(adam_map, 4));
      opt.opacity.reindex(expand_map(adam_map, 1));
      opt.color.reindex(expand_map(adam_map, 3));
      opt.sem.reindex(expand_map(adam_map, fp.K));

      fp = std::move(fp2);
      n = fp.count();
      grad_norm_acc.assign(n, 0.0);
      if (trace) trace->gaussian_counts.push_back(n);

      // Object groups can change size; rebuild the scene containers.
      GaussianScene rebuilt;
      rebuilt.num_classes = scene.num_classes;
      rebuilt.tracks = scene.tracks;
      for (const auto& [id, count] : fp.groups)
        if (id != kStaticObjectId)
          rebuilt.objects[id] = std::vector<Gaussian3D>(count);
      rebuilt.statics.resize(fp.groups.front().second);
      scene = std::move(rebuilt);
    }
  }

  scatter(fp, scene);
  return scene;
}

}  // namespace streetforge
