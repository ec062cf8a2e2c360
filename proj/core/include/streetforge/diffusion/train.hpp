#pragma once

#include <functional>
#include <string>
#include <vector>

#include "streetforge/diffusion/tiny_denoiser.hpp"

namespace streetforge {

enum class TrainObjective { V, Eps };

// One training draw: a clean latent and its condition stack. The builder is
// responsible for reference dropout, so dropout is re-sampled every step.
struct TrainExample {
  LatentTensor x0;
  ConditionStack cond;
};
using ExampleSampler = std::function<TrainExample(Rng&)>;

struct TrainConfig {
  TrainObjective objective = TrainObjective::V;
  VParameterization v_param = kDefaultVParam;
  int steps = 2000;
  double lr = 1e-3;
  uint64_t seed = 0;
};

struct LossTrace {
  std::vector<double> raw;  // one entry per step

  // Trailing-window running mean.
  std::vector<double> smoothed(int window = 100) const;
  void write_csv(const std::string& path) const;
};

// Minimizes the mean-squared prediction error over uniformly drawn
// timesteps with fresh noise each step. Throws NumericalError (with the
// step index) if the loss stops being finite.
LossTrace train_denoiser(TinyDenoiser& model, const ExampleSampler& dataset,
                         const NoiseSchedule& sched, const TrainConfig& cfg);

}  // namespace streetforge
