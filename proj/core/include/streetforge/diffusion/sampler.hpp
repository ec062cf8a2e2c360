#pragma once

#include <cstdint>

#include "streetforge/diffusion/denoiser.hpp"
#include "streetforge/rng.hpp"

namespace streetforge {

constexpr int kDefaultSampleSteps = 50;

// Which v formula the training objective targets. Standard is
// v = alpha*eps - sigma*x0; PaperXt swaps x0 for x_t as printed in some
// write-ups and is kept selectable for comparison.
enum class VParameterization { Standard, PaperXt };
constexpr VParameterization kDefaultVParam = VParameterization::Standard;

// Forward process: x_t = alpha(t)*x0 + sigma(t)*eps.
LatentTensor q_sample(const LatentTensor& x0, int t, const LatentTensor& eps,
                      const NoiseSchedule& sched);

// Training target for the chosen parameterization.
LatentTensor v_target(const LatentTensor& x0, const LatentTensor& eps, int t,
                      const NoiseSchedule& sched,
                      VParameterization param = kDefaultVParam);

// Algebraic inverse of the standard parameterization:
// x0 = alpha*x_t - sigma*v, eps = sigma*x_t + alpha*v.
struct VDecomposition {
  LatentTensor x0_hat;
  LatentTensor eps_hat;
};
VDecomposition from_v(const LatentTensor& x_t, const LatentTensor& v, int t,
                      const NoiseSchedule& sched);

// One DDIM update from step t down to step s (< t). eta = 0 is the
// deterministic sampler; eta > 0 replaces a sigma_tilde portion of eps_hat
// with fresh noise drawn from rng.
LatentTensor ddim_step(const LatentTensor& x_t, const LatentTensor& v_hat,
                       int t, int s, double eta, const NoiseSchedule& sched,
                       Rng& rng);

struct SampleConfig {
  int num_steps = kDefaultSampleSteps;
  double eta = 0.0;
  uint64_t seed = 0;

  void validate(const NoiseSchedule& sched) const {
    require(num_steps >= 1 && num_steps <= sched.T(),
            "num_steps must be in [1, T]");
    require(eta >= 0.0 && eta <= 1.0, "eta must be in [0,1]");
  }
};

// Uniformly spaced descending timestep subset T = s_0 > s_1 > ... > s_n = 0
// with n = num_steps transitions.
std::vector<int> sample_timesteps(const NoiseSchedule& sched, int num_steps);

// Full sampling loop: draws x_T from the standard normal keyed by cfg.seed,
// iterates ddim_step over the subset, returns the final step's x0_hat.
LatentTensor sample(const Denoiser& denoiser, const ConditionStack& cond,
                    const NoiseSchedule& sched, const SampleConfig& cfg);

}  // namespace streetforge
