#pragma once

#include "streetforge/conditioning/stack.hpp"
#include "streetforge/diffusion/schedule.hpp"
#include "streetforge/image.hpp"

namespace streetforge {

// Conditional v-prediction network interface. Implementations must be
// deterministic for fixed inputs and return a tensor of the input's shape.
class Denoiser {
 public:
  virtual ~Denoiser() = default;

  virtual LatentTensor predict_v(const LatentTensor& x_t, int t,
                                 const ConditionStack& cond) const = 0;

  // Shape of the latent this denoiser generates for a given stack; the
  // sampler uses it to draw x_T.
  virtual std::array<int, 3> latent_shape(const ConditionStack& cond) const = 0;
};

// Analytic oracle: entrywise Gaussian data x0 ~ N(mu, s2) yields a closed
// form for E[x0 | x_t] under the forward process, hence an exact v. Used to
// test the sampler against ground truth no network can provide.
class GaussianOracle final : public Denoiser {
 public:
  GaussianOracle(LatentTensor mu, LatentTensor s2, const NoiseSchedule& sched);

  // Scalar-variance convenience.
  GaussianOracle(LatentTensor mu, double s2, const NoiseSchedule& sched);

  LatentTensor predict_v(const LatentTensor& x_t, int t,
                         const ConditionStack& cond) const override;

  std::array<int, 3> latent_shape(const ConditionStack&) const override {
    return {mu_.h, mu_.w, mu_.c};
  }

  const LatentTensor& mu() const { return mu_; }

 private:
  LatentTensor mu_;
  LatentTensor s2_;
  const NoiseSchedule& sched_;
};

}  // namespace streetforge
