#pragma once

#include <set>

#include "streetforge/diffusion/sampler.hpp"
#include "streetforge/pipeline/bundle.hpp"
#include "streetforge/pipeline/metrics.hpp"

namespace streetforge {

// A requested novel view: pose plus the scene time it samples.
struct NovelView {
  Pose cam_to_world;
  double time = 0.0;
};

struct NvsConfig {
  SampleConfig sampling;
  std::set<TaskId> tasks = {TaskId::Color, TaskId::Depth, TaskId::Semantic};
};

struct NvsResult {
  std::vector<ViewRasters> views;       // one per novel view
  std::vector<SparseMap> conditions;    // sparse projections per novel view
  int reference_frame = 0;
};

// Builds a denoiser that treats the deterministically densified sparse
// conditions as a point-mass data distribution: sampling returns exactly the
// completion, making the full conditioning/sampling/decoding path runnable
// without a trained network.
std::unique_ptr<Denoiser> make_completion_oracle(
    const SceneBundle& bundle, const std::vector<SparseMap>& conditions,
    const NoiseSchedule& sched);

// Feed-forward synthesis: fuses the bundle's LiDAR, projects sparse
// conditions at each novel pose, forms the inference queue with the
// nearest-timestamp observed frame as the reference, then runs one sampling
// pass per requested task and decodes the results. Never mutates the bundle
// and performs no per-scene optimization. Pass denoiser = nullptr to use the
// completion oracle.
NvsResult run_feedforward_nvs(const SceneBundle& bundle,
                              const std::vector<NovelView>& trajectory,
                              const Denoiser* denoiser, const NoiseSchedule& sched,
                              const NvsConfig& cfg);

// Lateral-shift trajectory: every bundle frame's pose offset by `shift`
// meters along its own camera x axis.
std::vector<NovelView> shifted_trajectory(const SceneBundle& bundle, double shift);

}  // namespace streetforge
