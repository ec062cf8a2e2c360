#include <doctest.h>

#include "streetforge/conditioning/stack.hpp"
#include "streetforge/diffusion/sampler.hpp"
#include "streetforge/modality/codec.hpp"

using namespace streetforge;

namespace {

// Small raster setup: 16x16 images give 2x2x192 latents.
constexpr int kW = 16, kH = 16;

PseudoImage test_image(double fill) { return PseudoImage(kW, kH, fill); }

SparseMap test_view(Rng& rng, double density = 0.2) {
  SparseMap view(kW, kH);
  for (size_t i = 0; i < view.depth.size(); ++i) {
    if (rng.uniform() < density) {
      view.depth[i] = 1.0 + 20.0 * rng.uniform();
      for (int c = 0; c < 3; ++c) view.color[3 * i + c] = rng.uniform();
    }
  }
  return view;
}

std::vector<SparseMap> test_views(int n, uint64_t seed = 3) {
  Rng rng(seed);
  std::vector<SparseMap> out;
  for (int i = 0; i < n; ++i) out.push_back(test_view(rng));
  return out;
}

}  // namespace

TEST_CASE("build_train_stack layout") {
  Rng rng(1);
  auto views = test_views(4);  // N = 3
  ConditionStack stack =
      build_train_stack(test_image(0.5), views, TaskId::Color, 0.0, rng);

  CHECK(stack.entries() == 4);
  CHECK(stack.depth_latents.size() == 4);
  CHECK(stack.ref_dropped == false);
  // Entry 0 is the dense reference: constant 0.5 encodes to constant 0.
  for (double v : stack.color_latents[0].values) CHECK(v == 0.0);
  CHECK(stack.color_latents[0].values == stack.ref_latent.values);
  // Entries 1..N are the sparse projections.
  for (int i = 1; i < 4; ++i)
    CHECK(stack.color_latents[i].values ==
          latent_encode(views[i].color_image()).values);
}

TEST_CASE("build_train_stack dropout") {
  SUBCASE("drop_p = 1 forces the zero reference") {
    Rng rng(2);
    ConditionStack stack =
        build_train_stack(test_image(0.9), test_views(2), TaskId::Depth, 1.0, rng);
    CHECK(stack.ref_dropped == true);
    for (double v : stack.color_latents[0].values) CHECK(v == 0.0);
    for (double v : stack.ref_latent.values) CHECK(v == 0.0);
    // Depth conditions are never dropped.
    bool depth_nonzero = false;
    for (double v : stack.depth_latents[0].values) depth_nonzero |= v != 0.0;
    CHECK(depth_nonzero);
  }

  SUBCASE("default dropout probability is 0.2") {
    CHECK(kDefaultRefDropout == 0.2);
  }

  SUBCASE("empirical rate over seeded builds stays near 0.2") {
    auto views = test_views(1);
    PseudoImage ref = test_image(0.3);
    int dropped = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      Rng rng(i);
      ConditionStack stack =
          build_train_stack(ref, views, TaskId::Color, kDefaultRefDropout, rng);
      dropped += stack.ref_dropped;
    }
    double rate = static_cast<double>(dropped) / n;
    CHECK(rate >= 0.18);
    CHECK(rate <= 0.22);
  }
}

TEST_CASE("build_infer_stack") {
  auto views = test_views(3, 17);
  PseudoImage ref = test_image(0.25);
  SparseMap ref_depth = views[0];
  std::vector<SparseMap> novel(views.begin() + 1, views.end());

  SUBCASE("N = 1 gives two color entries, reference first") {
    ConditionStack stack = build_infer_stack(ref, ref_depth, {novel[0]}, TaskId::Color);
    CHECK(stack.entries() == 2);
    CHECK(stack.color_latents[0].values == latent_encode(ref).values);
    CHECK(stack.depth_latents.size() == 2);
  }

  SUBCASE("no randomness: identical inputs give identical stacks") {
    ConditionStack a = build_infer_stack(ref, ref_depth, novel, TaskId::Semantic);
    ConditionStack b = build_infer_stack(ref, ref_depth, novel, TaskId::Semantic);
    CHECK(a.color_latents[1].values == b.color_latents[1].values);
    CHECK(a.depth_latents[0].values == b.depth_latents[0].values);
    CHECK(a.ref_dropped == false);
    CHECK(b.ref_dropped == false);
  }

  SUBCASE("all three tasks sample to the same spatial shape") {
    NoiseSchedule sched = make_ddpm_schedule(50);
    SampleConfig cfg;
    cfg.num_steps = 5;
    std::array<int, 3> shape{};
    for (TaskId task : {TaskId::Color, TaskId::Depth, TaskId::Semantic}) {
      ConditionStack stack = build_infer_stack(ref, ref_depth, novel, task);
      GaussianOracle oracle(LatentTensor(stack.ref_latent.h, stack.ref_latent.w, 8, 0.1),
                            0.0, sched);
      LatentTensor out = sample(oracle, stack, sched, cfg);
      std::array<int, 3> got{out.h, out.w, out.c};
      if (task == TaskId::Color) shape = got;
      CHECK(got == shape);
    }
  }
}

TEST_CASE("edit_reference") {
  Rng rng(5);
  auto views = test_views(3);
  ConditionStack stack =
      build_train_stack(test_image(0.5), views, TaskId::Color, 0.0, rng);

  PseudoImage replacement = test_image(0.75);

  SUBCASE("slot 0 becomes the new encoding") {
    ConditionStack edited = edit_reference(stack, replacement);
    CHECK(edited.color_latents[0].values == latent_encode(replacement).values);
    CHECK(edited.ref_latent.values == edited.color_latents[0].values);
  }

  SUBCASE("sparse entries are bit-identical") {
    ConditionStack edited = edit_reference(stack, replacement);
    for (int i = 1; i < stack.entries(); ++i) {
      CHECK(edited.color_latents[i].values == stack.color_latents[i].values);
      CHECK(edited.depth_latents[i].values == stack.depth_latents[i].values);
    }
  }

  SUBCASE("swapping twice equals swapping once") {
    ConditionStack once = edit_reference(stack, replacement);
    ConditionStack twice = edit_reference(once, replacement);
    CHECK(once.color_latents[0].values == twice.color_latents[0].values);
  }

  SUBCASE("size mismatch errors") {
    PseudoImage wrong(kW * 2, kH);
    CHECK_THROWS_AS(edit_reference(stack, wrong), ValidationError);
  }
}

TEST_CASE("edit_remove_object") {
  Rng rng(7);
  PointCloud frame;
  for (int i = 0; i < 100; ++i)
    frame.push(Eigen::Vector3d(10 * rng.normal(), 10 * rng.normal(), 10 * rng.normal()),
               Eigen::Vector3d(1, 1, 1), kStaticObjectId);
  // Cluster of points inside a tracked box.
  BBoxTrack tr;
  tr.object_id = 6;
  tr.size = {4, 4, 4};
  tr.class_label = 2;
  tr.times = {0.0, 1.0};
  tr.poses = {Pose(Eigen::Quaterniond::Identity(), {30, 0, 0}),
              Pose(Eigen::Quaterniond::Identity(), {30, 0, 0})};
  for (int i = 0; i < 25; ++i)
    frame.push(Eigen::Vector3d(30 + rng.uniform() - 0.5, rng.uniform() - 0.5,
                               rng.uniform() - 0.5),
               Eigen::Vector3d(1, 0, 0), kStaticObjectId);

  FusedScene scene = aggregate({{frame, 0.5}}, {tr});
  size_t object_count = scene.objects.at(6).size();
  REQUIRE(object_count == 25);

  SUBCASE("recompose count drops by the object's size") {
    FusedScene edited = edit_remove_object(scene, 6);
    CHECK(recompose(edited, 0.5).size() == frame.size() - object_count);
    CHECK(edited.find_track(6) == nullptr);
  }

  SUBCASE("unknown id errors, double removal errors") {
    CHECK_THROWS_AS(edit_remove_object(scene, 42), ValidationError);
    FusedScene edited = edit_remove_object(scene, 6);
    CHECK_THROWS_AS(edit_remove_object(edited, 6), ValidationError);
  }

  SUBCASE("no projected pixel originates from the removed object") {
    CameraModel cam(40, 40, 31.5, 23.5, 64, 48);
    Pose view(Eigen::Quaterniond::Identity(), Eigen::Vector3d(30, 0, -10));
    FusedScene edited = edit_remove_object(scene, 6);
    PointCloud cloud = recompose(edited, 0.5);

    // Shadow buffer: per-pixel winning point index maps back to object ids.
    ProjectionTrace trace;
    SparseMap map = project_sparse(cloud, cam, view, &trace);
    for (int32_t src : trace) {
      if (src < 0) continue;
      CHECK(cloud.object_ids[src] != 6);
    }
    // The same audit on the unedited scene does see object pixels.
    PointCloud full = recompose(scene, 0.5);
    ProjectionTrace full_trace;
    project_sparse(full, cam, view, &full_trace);
    bool saw_object = false;
    for (int32_t src : full_trace)
      if (src >= 0 && full.object_ids[src] == 6) saw_object = true;
    CHECK(saw_object);
  }
}
