#include <doctest.h>

#include <cmath>

#include "streetforge/rng.hpp"
#include "streetforge/splat/gaussian_scene.hpp"
#include "streetforge/splat/losses.hpp"
#include "streetforge/splat/optimize.hpp"
#include "streetforge/splat/rasterizer.hpp"
#include "streetforge/splat/ssim.hpp"

using namespace streetforge;

namespace {

Gaussian3D make_gaussian(const Eigen::Vector3d& mean, double scale, double opacity_logit,
                         const Eigen::Vector3d& color, int K = 2) {
  Gaussian3D g;
  g.mean = mean;
  g.log_scale = Eigen::Vector3d::Constant(std::log(scale));
  g.opacity_logit = opacity_logit;
  g.color = color;
  g.sem_logits = Eigen::VectorXd::Zero(K);
  return g;
}

GaussianScene small_scene(int K = 2) {
  GaussianScene scene;
  scene.num_classes = K;
  return scene;
}

CameraModel test_cam(int w = 16, int h = 16) {
  return CameraModel(12.0, 12.0, (w - 1) * 0.5, (h - 1) * 0.5, w, h);
}

}  // namespace

TEST_CASE("init_from_cloud") {
  Rng rng(3);
  FusedScene fused;
  for (int i = 0; i < 200; ++i)
    fused.static_world.push(
        Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()),
        Eigen::Vector3d(rng.uniform(), rng.uniform(), rng.uniform()),
        kStaticObjectId);

  SUBCASE("stride 1 keeps every point") {
    GaussianScene scene = init_from_cloud(fused, 1, 3);
    REQUIRE(scene.statics.size() == 200);
    for (size_t i = 0; i < 200; ++i) {
      CHECK(scene.statics[i].mean == fused.static_world.positions[i]);
      CHECK(scene.statics[i].color == fused.static_world.colors[i]);
      CHECK(scene.statics[i].opacity_logit == 0.0);
      CHECK(scene.statics[i].sem_logits.size() == 3);
    }
  }

  SUBCASE("scale matches an all-pairs 3-NN oracle") {
    GaussianScene scene = init_from_cloud(fused, 1, 2);
    for (size_t i = 0; i < 200; ++i) {
      std::vector<double> d;
      for (size_t j = 0; j < 200; ++j)
        if (j != i)
          d.push_back((fused.static_world.positions[i] -
                       fused.static_world.positions[j]).norm());
      std::sort(d.begin(), d.end());
      double expect = std::max((d[0] + d[1] + d[2]) / 3.0, 0.05);
      CHECK(std::exp(scene.statics[i].log_scale.x()) ==
            doctest::Approx(expect).epsilon(1e-9));
    }
  }

  SUBCASE("empty result errors") {
    FusedScene empty;
    CHECK_THROWS_AS(init_from_cloud(empty, 1, 2), ValidationError);
  }
}

TEST_CASE("rasterize basics") {
  CameraModel cam = test_cam();

  SUBCASE("empty scene renders background") {
    GaussianScene scene = small_scene();
    RenderOutput out = rasterize(scene, cam, Pose::identity(), 0.0);
    for (double v : out.color) CHECK(v == 0.0);
    for (double v : out.alpha) CHECK(v == 0.0);
  }

  SUBCASE("single dominant splat reports its color and depth") {
    GaussianScene scene = small_scene();
    scene.statics.push_back(
        make_gaussian({0, 0, 5}, 4.0, 12.0, {0.9, 0.4, 0.1}));
    RenderOutput out = rasterize(scene, cam, Pose::identity(), 0.0);
    size_t center = (cam.height / 2) * cam.width + cam.width / 2;
    CHECK(std::abs(out.color[center * 3 + 0] - 0.9) < 1e-2);
    CHECK(std::abs(out.color[center * 3 + 1] - 0.4) < 1e-2);
    CHECK(std::abs(out.depth[center] - 5.0) < 1e-2);
  }

  SUBCASE("two overlapping splats composite front to back") {
    // Hand-computed weights: w_front = a, w_back = a*(1-a).
    GaussianScene scene = small_scene();
    Gaussian3D front = make_gaussian({0, 0, 4}, 6.0, 0.0, {1, 0, 0});
    Gaussian3D back = make_gaussian({0, 0, 8}, 12.0, 0.0, {0, 0, 1});
    // Opacity logit for alpha 0.9 at the center (big scale => exp term ~ 1).
    front.opacity_logit = std::log(0.9 / 0.1);
    back.opacity_logit = std::log(0.9 / 0.1);
    scene.statics = {front, back};

    RenderOutput out = rasterize(scene, cam, Pose::identity(), 0.0);
    size_t center = (cam.height / 2) * cam.width + cam.width / 2;
    // Center pixel sits on the optical axis; the Gaussian peak is there, but
    // the conic dilation (+0.3) slightly lowers nothing at distance 0, so
    // alpha == opacity exactly at the mean.
    CHECK(out.color[center * 3 + 0] == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(out.color[center * 3 + 2] == doctest::Approx(0.09).epsilon(1e-6));
    CHECK(out.alpha[center] == doctest::Approx(0.99).epsilon(1e-6));
  }

  SUBCASE("weights stay within [0,1] and sum to at most 1") {
    Rng rng(7);
    GaussianScene scene = small_scene();
    for (int i = 0; i < 40; ++i)
      scene.statics.push_back(make_gaussian(
          {3.0 * rng.normal(), 3.0 * rng.normal(), 6.0 + 3.0 * rng.uniform()},
          0.2 + rng.uniform(), 2.0 * rng.normal(),
          {rng.uniform(), rng.uniform(), rng.uniform()}));
    RenderOutput out = rasterize(scene, cam, Pose::identity(), 0.0);
    for (double a : out.alpha) {
      CHECK(a >= 0.0);
      CHECK(a <= 1.0 + 1e-12);
    }
    // Semantic probabilities sum to alpha.
    for (size_t p = 0; p < out.pixels(); ++p) {
      double sum = 0.0;
      for (int k = 0; k < out.num_classes; ++k) sum += out.sem[p * 2 + k];
      CHECK(sum == doctest::Approx(out.alpha[p]).epsilon(1e-9));
    }
  }

  SUBCASE("input order of distinct-depth gaussians does not matter") {
    Rng rng(9);
    GaussianScene a = small_scene();
    for (int i = 0; i < 10; ++i)
      a.statics.push_back(make_gaussian(
          {2.0 * rng.normal(), 2.0 * rng.normal(), 4.0 + i * 0.5}, 0.8, 1.0,
          {rng.uniform(), rng.uniform(), rng.uniform()}));
    GaussianScene b = a;
    std::reverse(b.statics.begin(), b.statics.end());
    RenderOutput ra = rasterize(a, test_cam(), Pose::identity(), 0.0);
    RenderOutput rb = rasterize(b, test_cam(), Pose::identity(), 0.0);
    CHECK(ra.color == rb.color);
    CHECK(ra.depth == rb.depth);
  }

  SUBCASE("equal-depth tie follows insertion order") {
    GaussianScene scene = small_scene();
    Gaussian3D red = make_gaussian({0, 0, 5}, 4.0, std::log(0.5 / 0.5), {1, 0, 0});
    Gaussian3D blue = red;
    blue.color = {0, 0, 1};
    scene.statics = {red, blue};
    RenderOutput out = rasterize(scene, test_cam(), Pose::identity(), 0.0);
    size_t center = (8) * 16 + 8;
    // Front = insertion index 0 (red): w0 = 0.5, w1 = 0.25.
    CHECK(out.color[center * 3 + 0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(out.color[center * 3 + 2] == doctest::Approx(0.25).epsilon(1e-6));
  }
}

TEST_CASE("ssim") {
  SUBCASE("identical images give 1") {
    Rng rng(11);
    std::vector<double> img(32 * 32 * 3);
    for (double& v : img) v = rng.uniform();
    CHECK(ssim(img, img, 32, 32, 3) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("constant images match the closed form") {
    std::vector<double> a(20 * 20, 0.2), b(20 * 20, 0.8);
    double c1 = 1e-4;
    double expect = (2.0 * 0.2 * 0.8 + c1) / (0.04 + 0.64 + c1);
    CHECK(ssim(a, b, 20, 20, 1) == doctest::Approx(expect).epsilon(1e-12));
  }

  SUBCASE("random pair matches a brute-force window oracle") {
    Rng rng(13);
    const int w = 18, h = 15;
    std::vector<double> a(w * h), b(w * h);
    for (double& v : a) v = rng.uniform();
    for (double& v : b) v = rng.uniform();

    // Direct per-window evaluation with the same 11x11 Gaussian kernel.
    double kernel[11];
    double ksum = 0;
    for (int i = 0; i < 11; ++i) {
      double d = i - 5.0;
      kernel[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
      ksum += kernel[i];
    }
    for (double& k : kernel) k /= ksum;

    double total = 0.0;
    int npos = 0;
    for (int y = 0; y + 11 <= h; ++y) {
      for (int x = 0; x + 11 <= w; ++x) {
        double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
        for (int i = 0; i < 11; ++i)
          for (int j = 0; j < 11; ++j) {
            double wgt = kernel[i] * kernel[j];
            double va = a[(y + i) * w + (x + j)];
            double vb = b[(y + i) * w + (x + j)];
            mu_a += wgt * va;
            mu_b += wgt * vb;
            aa += wgt * va * va;
            bb += wgt * vb * vb;
            ab += wgt * va * vb;
          }
        double var_a = aa - mu_a * mu_a, var_b = bb - mu_b * mu_b;
        double cov = ab - mu_a * mu_b;
        double c1 = 1e-4, c2 = 9e-4;
        total += ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
                 ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
        ++npos;
      }
    }
    CHECK(ssim(a, b, w, h, 1) == doctest::Approx(total / npos).epsilon(1e-6));
  }

  SUBCASE("ssim gradient matches finite differences") {
    Rng rng(17);
    const int w = 14, h = 13;
    std::vector<double> a(w * h), b(w * h);
    for (double& v : a) v = rng.uniform();
    for (double& v : b) v = rng.uniform();
    std::vector<double> grad;
    ssim_with_grad(a, b, w, h, 1, grad);
    const double step = 1e-6;
    for (size_t i = 0; i < a.size(); i += 17) {
      double orig = a[i];
      a[i] = orig + step;
      double up = ssim(a, b, w, h, 1);
      a[i] = orig - step;
      double down = ssim(a, b, w, h, 1);
      a[i] = orig;
      double fd = (up - down) / (2 * step);
      CHECK(std::abs(fd - grad[i]) < 1e-6);
    }
  }

  SUBCASE("shape mismatch errors") {
    std::vector<double> a(12 * 12), b(12 * 13);
    CHECK_THROWS_AS(ssim(a, b, 12, 12, 1), ValidationError);
  }
}

TEST_CASE("loss_input") {
  CameraModel cam = test_cam(16, 16);
  GaussianScene scene = small_scene();
  scene.statics.push_back(make_gaussian({0, 0, 5}, 3.0, 4.0, {0.3, 0.6, 0.2}));
  RenderOutput render = rasterize(scene, cam, Pose::identity(), 0.0);

  PseudoImage gt(16, 16);
  for (size_t i = 0; i < gt.values.size(); ++i)
    gt.values[i] = std::clamp(render.color[i], 0.0, 1.0);
  DepthMap gt_depth(16, 16);
  gt_depth.values = render.depth;

  SUBCASE("perfect render scores 0") {
    LossResult r = loss_input(render, gt, gt_depth, 0.8, 0.2, 0.1);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("zero weights score 0") {
    PseudoImage other(16, 16, 0.9);
    LossResult r = loss_input(render, other, gt_depth, 0.0, 0.0, 0.0);
    CHECK(r.value == 0.0);
  }

  SUBCASE("loss is linear in the weights") {
    PseudoImage other(16, 16, 0.9);
    DepthMap other_depth(16, 16, 3.0);
    LossResult single = loss_input(render, other, other_depth, 0.8, 0.2, 0.1);
    LossResult doubled = loss_input(render, other, other_depth, 1.6, 0.4, 0.2);
    CHECK(doubled.value == doctest::Approx(2.0 * single.value).epsilon(1e-12));
  }

  SUBCASE("all-invalid depth contributes zero") {
    DepthMap invalid(16, 16, 0.0);
    LossResult with = loss_input(render, gt, invalid, 0.8, 0.2, 10.0);
    LossResult without = loss_input(render, gt, invalid, 0.8, 0.2, 0.0);
    CHECK(with.value == doctest::Approx(without.value).epsilon(1e-12));
  }
}

TEST_CASE("loss_virtual") {
  const int K = 4;
  RenderOutput render(12, 12, K);
  PseudoImage color(12, 12, 0.5);
  for (size_t i = 0; i < render.color.size(); ++i) render.color[i] = 0.5;
  DepthMap depth(12, 12, 5.0);
  render.depth.assign(render.depth.size(), 5.0);
  SemanticMap labels(12, 12, 2);

  SUBCASE("one-hot semantics at the true label scores CE 0") {
    for (size_t p = 0; p < render.pixels(); ++p) {
      render.alpha[p] = 1.0;
      render.sem[p * K + 2] = 1.0;
    }
    LossResult r = loss_virtual(render, color, depth, labels, 0.0, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("uniform probabilities give ln K") {
    for (size_t p = 0; p < render.pixels(); ++p) {
      render.alpha[p] = 1.0;
      for (int k = 0; k < K; ++k) render.sem[p * K + k] = 0.25;
    }
    LossResult r = loss_virtual(render, color, depth, labels, 0.0, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(std::log(4.0)).epsilon(1e-9));
  }

  SUBCASE("perfect color and depth with zero semantic weight score 0") {
    LossResult r = loss_virtual(render, color, depth, labels, 0.5, 0.1, 0.0);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("out-of-range label errors") {
    SemanticMap bad(12, 12, 9);
    CHECK_THROWS_AS(loss_virtual(render, color, depth, bad, 0.0, 0.0, 1.0),
                    ValidationError);
  }
}

namespace {

// Scalar loss for finite differences: fixed random adjoint over channels.
struct AdjointProbe {
  RenderOutput adjoint;

  explicit AdjointProbe(int w, int h, int K, uint64_t seed) : adjoint(w, h, K) {
    Rng rng(seed);
    for (double& v : adjoint.color) v = rng.normal();
    for (double& v : adjoint.depth) v = 0.1 * rng.normal();
    for (double& v : adjoint.sem) v = rng.normal();
    for (double& v : adjoint.alpha) v = rng.normal();
  }

  double value(const RenderOutput& r) const {
    double acc = 0.0;
    for (size_t i = 0; i < r.color.size(); ++i) acc += r.color[i] * adjoint.color[i];
    for (size_t i = 0; i < r.depth.size(); ++i) acc += r.depth[i] * adjoint.depth[i];
    for (size_t i = 0; i < r.sem.size(); ++i) acc += r.sem[i] * adjoint.sem[i];
    for (size_t i = 0; i < r.alpha.size(); ++i) acc += r.alpha[i] * adjoint.alpha[i];
    return acc;
  }
};

GaussianScene fd_scene() {
  GaussianScene scene = small_scene(3);
  Rng rng(23);
  auto rand_gaussian = [&](Eigen::Vector3d mean) {
    Gaussian3D g;
    g.mean = mean;
    g.log_scale = Eigen::Vector3d(std::log(0.4) + 0.2 * rng.normal(),
                                  std::log(0.5) + 0.2 * rng.normal(),
                                  std::log(0.6) + 0.2 * rng.normal());
    Eigen::Quaterniond q(1.0 + 0.1 * rng.normal(), 0.2 * rng.normal(),
                         0.2 * rng.normal(), 0.2 * rng.normal());
    g.rotation = q;  // deliberately not normalized; the rasterizer handles it
    g.opacity_logit = 0.5 * rng.normal();
    g.color = {rng.uniform(), rng.uniform(), rng.uniform()};
    g.sem_logits = Eigen::VectorXd(3);
    for (int k = 0; k < 3; ++k) g.sem_logits[k] = 0.5 * rng.normal();
    return g;
  };
  scene.statics.push_back(rand_gaussian({0.0, 0.2, 4.0}));
  scene.statics.push_back(rand_gaussian({-0.5, -0.3, 5.0}));
  scene.statics.push_back(rand_gaussian({0.4, 0.1, 4.5}));

  // One dynamic object exercises the track-transform chain.
  BBoxTrack tr;
  tr.object_id = 2;
  tr.size = {2, 2, 2};
  tr.class_label = 1;
  tr.times = {0.0, 1.0};
  tr.poses = {Pose(Eigen::Quaterniond(Eigen::AngleAxisd(0.3, Eigen::Vector3d(0, 1, 0).normalized())),
                   Eigen::Vector3d(0.5, 0, 4.0)),
              Pose(Eigen::Quaterniond(Eigen::AngleAxisd(0.5, Eigen::Vector3d(0, 1, 0).normalized())),
                   Eigen::Vector3d(0.8, 0.1, 4.2))};
  scene.tracks.push_back(tr);
  scene.objects[2] = {rand_gaussian({0.1, 0.0, 0.0}), rand_gaussian({-0.2, 0.1, 0.1})};
  return scene;
}

// Flattened parameter access for the FD sweep.
std::vector<double*> gaussian_params(Gaussian3D& g) {
  std::vector<double*> out;
  for (int i = 0; i < 3; ++i) out.push_back(&g.mean[i]);
  for (int i = 0; i < 3; ++i) out.push_back(&g.log_scale[i]);
  out.push_back(&g.rotation.w());
  out.push_back(&g.rotation.x());
  out.push_back(&g.rotation.y());
  out.push_back(&g.rotation.z());
  out.push_back(&g.opacity_logit);
  for (int i = 0; i < 3; ++i) out.push_back(&g.color[i]);
  for (int i = 0; i < g.sem_logits.size(); ++i) out.push_back(&g.sem_logits[i]);
  return out;
}

std::vector<double> gaussian_grads(const GaussianGrad& g) {
  std::vector<double> out;
  for (int i = 0; i < 3; ++i) out.push_back(g.mean[i]);
  for (int i = 0; i < 3; ++i) out.push_back(g.log_scale[i]);
  for (int i = 0; i < 4; ++i) out.push_back(g.rotation[i]);
  out.push_back(g.opacity_logit);
  for (int i = 0; i < 3; ++i) out.push_back(g.color[i]);
  for (int i = 0; i < g.sem_logits.size(); ++i) out.push_back(g.sem_logits[i]);
  return out;
}

}  // namespace

TEST_CASE("rasterize_grad matches central finite differences") {
  CameraModel cam = test_cam(16, 16);
  Pose view = Pose::identity();
  const double time = 0.5;

  GaussianScene scene = fd_scene();
  AdjointProbe probe(16, 16, 3, 31);

  SceneGrad analytic = rasterize_grad(scene, cam, view, time, probe.adjoint);

  const double step = 1e-4;
  auto fd_check = [&](Gaussian3D& g, const GaussianGrad& grad) {
    std::vector<double*> params = gaussian_params(g);
    std::vector<double> expect = gaussian_grads(grad);
    REQUIRE(params.size() == expect.size());
    for (size_t i = 0; i < params.size(); ++i) {
      double orig = *params[i];
      *params[i] = orig + step;
      double up = probe.value(rasterize(scene, cam, view, time));
      *params[i] = orig - step;
      double down = probe.value(rasterize(scene, cam, view, time));
      *params[i] = orig;
      double fd = (up - down) / (2 * step);
      double denom = std::max({std::abs(fd), std::abs(expect[i]), 1e-5});
      CHECK(std::abs(fd - expect[i]) / denom < 1e-3);
    }
  };

  for (size_t i = 0; i < scene.statics.size(); ++i)
    fd_check(scene.statics[i], analytic.statics[i]);
  for (auto& [id, group] : scene.objects)
    for (size_t i = 0; i < group.size(); ++i)
      fd_check(group[i], analytic.objects.at(id)[i]);
}

TEST_CASE("out-of-frustum gaussian has exactly zero gradients") {
  CameraModel cam = test_cam();
  GaussianScene scene = small_scene();
  scene.statics.push_back(make_gaussian({0, 0, 5}, 1.0, 1.0, {1, 0, 0}));
  scene.statics.push_back(make_gaussian({0, 0, -10}, 1.0, 1.0, {0, 1, 0}));

  AdjointProbe probe(16, 16, 2, 5);
  SceneGrad grad = rasterize_grad(scene, cam, Pose::identity(), 0.0, probe.adjoint);
  const GaussianGrad& behind = grad.statics[1];
  CHECK(behind.mean.norm() == 0.0);
  CHECK(behind.log_scale.norm() == 0.0);
  CHECK(behind.rotation.norm() == 0.0);
  CHECK(behind.opacity_logit == 0.0);
  CHECK(behind.color.norm() == 0.0);
  CHECK(behind.sem_logits.norm() == 0.0);
}

TEST_CASE("L1 color gradient sign: brighter render pulls color down") {
  CameraModel cam = test_cam();
  GaussianScene scene = small_scene();
  scene.statics.push_back(make_gaussian({0, 0, 5}, 3.0, 4.0, {0.8, 0.8, 0.8}));
  RenderOutput render = rasterize(scene, cam, Pose::identity(), 0.0);

  PseudoImage dark_gt(16, 16, 0.1);
  DepthMap no_depth(16, 16, 0.0);
  LossResult loss = loss_input(render, dark_gt, no_depth, 1.0, 0.0, 0.0);
  SceneGrad grad = rasterize_grad(scene, cam, Pose::identity(), 0.0, loss.adjoint);
  // Positive gradient on every contributing channel: stepping down darkens.
  for (int c = 0; c < 3; ++c) CHECK(grad.statics[0].color[c] > 0.0);
}

TEST_CASE("optimize") {
  // Tiny overfit setup: one view, a handful of gaussians.
  CameraModel cam = test_cam(16, 16);
  GaussianScene target = small_scene();
  target.statics.push_back(make_gaussian({-0.4, 0, 4}, 0.8, 2.0, {0.9, 0.1, 0.1}));
  target.statics.push_back(make_gaussian({0.4, 0.2, 5}, 0.8, 2.0, {0.1, 0.2, 0.9}));
  RenderOutput gt = rasterize(target, cam, Pose::identity(), 0.0);

  RealView view;
  view.cam = cam;
  view.cam_to_world = Pose::identity();
  view.time = 0.0;
  view.color = PseudoImage(16, 16);
  for (size_t i = 0; i < gt.color.size(); ++i)
    view.color.values[i] = std::clamp(gt.color[i], 0.0, 1.0);
  view.depth = DepthMap(16, 16);
  view.depth.values = gt.depth;

  GaussianScene init = small_scene();
  init.statics.push_back(make_gaussian({-0.3, 0.1, 4.2}, 0.7, 1.0, {0.5, 0.5, 0.5}));
  init.statics.push_back(make_gaussian({0.3, 0.1, 4.8}, 0.7, 1.0, {0.5, 0.5, 0.5}));

  SUBCASE("theta = 0 never touches virtual views") {
    OptimizeConfig cfg;
    cfg.iters = 20;
    cfg.theta = 0.0;
    cfg.densify = false;
    OptimizeTrace trace;
    optimize(init, {view}, {}, cfg, &trace);
    CHECK(trace.virtual_picks == 0);
    CHECK(trace.real_picks == 20);
  }

  SUBCASE("default theta is 0.2") {
    OptimizeConfig cfg;
    CHECK(cfg.theta == 0.2);
  }

  SUBCASE("theta frequency over many iterations") {
    VirtualView vv;
    vv.cam = cam;
    vv.cam_to_world = Pose::identity();
    vv.time = 0.0;
    vv.color = view.color;
    vv.depth = view.depth;
    vv.sem = SemanticMap(16, 16, 0);

    // Empty-scene render keeps each iteration cheap; only the pick counter
    // matters here.
    GaussianScene lone = small_scene();
    lone.statics.push_back(make_gaussian({0, 0, 5}, 0.5, 0.0, {0.5, 0.5, 0.5}));

    OptimizeConfig cfg;
    cfg.iters = 10000;
    cfg.theta = 0.2;
    cfg.densify = false;
    cfg.weights.ssim = 0.0;  // keep the loop fast
    cfg.weights.v_color = 0.0;
    OptimizeTrace trace;
    optimize(lone, {view}, {vv}, cfg, &trace);
    double frac = static_cast<double>(trace.virtual_picks) / cfg.iters;
    CHECK(frac >= 0.18);
    CHECK(frac <= 0.22);
  }

  SUBCASE("loss decreases while overfitting one view") {
    OptimizeConfig cfg;
    cfg.iters = 300;
    cfg.theta = 0.0;
    cfg.densify = false;
    OptimizeTrace trace;
    optimize(init, {view}, {}, cfg, &trace);
    double head = 0, tail = 0;
    for (int i = 0; i < 50; ++i) head += trace.loss[i];
    for (int i = 250; i < 300; ++i) tail += trace.loss[i];
    CHECK(tail < head);
  }

  SUBCASE("quaternions stay unit after optimization") {
    OptimizeConfig cfg;
    cfg.iters = 50;
    cfg.theta = 0.0;
    cfg.densify = false;
    GaussianScene out = optimize(init, {view}, {}, cfg, nullptr);
    for (const auto& g : out.statics)
      CHECK(std::abs(g.rotation.norm() - 1.0) < 1e-6);
  }
}

TEST_CASE("gaussian scene file round trip") {
  GaussianScene scene = fd_scene();
  save_gaussian_scene(scene, "scene_roundtrip.bin");
  GaussianScene back = load_gaussian_scene("scene_roundtrip.bin");
  REQUIRE(back.statics.size() == scene.statics.size());
  REQUIRE(back.objects.size() == scene.objects.size());
  CHECK(back.num_classes == scene.num_classes);
  for (size_t i = 0; i < scene.statics.size(); ++i) {
    CHECK(std::abs(back.statics[i].mean.x() - scene.statics[i].mean.x()) < 1e-6);
    CHECK(std::abs(back.statics[i].opacity_logit - scene.statics[i].opacity_logit) < 1e-6);
  }
  CHECK(back.tracks.size() == scene.tracks.size());
  std::remove("scene_roundtrip.bin");
}
