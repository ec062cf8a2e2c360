#pragma once

#include <Eigen/Dense>
#include <string>

#include "streetforge/diffusion/denoiser.hpp"
#include "streetforge/diffusion/sampler.hpp"

namespace streetforge {

// Small trainable denoiser: a two-hidden-layer tanh MLP applied per latent
// location with shared weights (a stack of 1x1 convolutions). Per-location
// input features are the noisy latent's channels, the reference latent, the
// mean sparse color latent, the mean sparse depth latent, the schedule
// coefficients (alpha, sigma) and the 3-entry task embedding.
//
// Backpropagation is written out by hand; gradients are checked against
// central finite differences in the test suite.
class TinyDenoiser final : public Denoiser {
 public:
  TinyDenoiser(int x_channels, int cond_channels, int hidden,
               const NoiseSchedule& sched, uint64_t init_seed = 1);

  int x_channels() const { return x_channels_; }
  int cond_channels() const { return cond_channels_; }
  int hidden() const { return hidden_; }
  int feature_dim() const { return x_channels_ + 3 * cond_channels_ + 5; }

  LatentTensor predict_v(const LatentTensor& x_t, int t,
                         const ConditionStack& cond) const override;

  std::array<int, 3> latent_shape(const ConditionStack& cond) const override;

  // Mean-squared loss against `target` and its gradient w.r.t. every
  // parameter, accumulated over all latent locations.
  double loss_and_gradient(const LatentTensor& x_t, int t,
                           const ConditionStack& cond,
                           const LatentTensor& target,
                           Eigen::VectorXd& grad) const;

  // Flat parameter access (layer weights then biases, fixed order).
  Eigen::Index param_count() const;
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);

  const NoiseSchedule& schedule() const { return sched_; }

  // JSON header + little-endian f32 blob.
  void save(const std::string& path, const std::string& objective) const;
  static TinyDenoiser load(const std::string& path, const NoiseSchedule& sched);

 private:
  Eigen::MatrixXd features(const LatentTensor& x_t, int t,
                           const ConditionStack& cond) const;

  int x_channels_, cond_channels_, hidden_;
  const NoiseSchedule& sched_;
  Eigen::MatrixXd w1_, w2_, w3_;
  Eigen::VectorXd b1_, b2_, b3_;
};

}  // namespace streetforge
