#include "streetforge/diffusion/sampler.hpp"

#include <cmath>

namespace streetforge {

namespace {

void require_same_shape(const LatentTensor& a, const LatentTensor& b) {
  require(a.same_shape(b), "latent shape mismatch");
}

}  // namespace

GaussianOracle::GaussianOracle(LatentTensor mu, LatentTensor s2,
                               const NoiseSchedule& sched)
    : mu_(std::move(mu)), s2_(std::move(s2)), sched_(sched) {
  require(mu_.same_shape(s2_), "mu and s2 must share shape");
  for (double v : s2_.values) require(v >= 0.0, "s2 must be >= 0");
}

GaussianOracle::GaussianOracle(LatentTensor mu, double s2,
                               const NoiseSchedule& sched)
    : mu_(std::move(mu)), s2_(mu_.h, mu_.w, mu_.c, s2), sched_(sched) {
  require(s2 >= 0.0, "s2 must be >= 0");
}

LatentTensor GaussianOracle::predict_v(const LatentTensor& x_t, int t,
                                       const ConditionStack&) const {
  require_same_shape(x_t, mu_);
  const double a = sched_.alpha(t);
  const double s = sched_.sigma(t);
  LatentTensor v(x_t.h, x_t.w, x_t.c);
  for (size_t i = 0; i < v.size(); ++i) {
    double s2 = s2_.values[i];
    if (s > 0.0) {
      double x0_hat =
          (a * s2 * x_t.values[i] + s * s * mu_.values[i]) / (a * a * s2 + s * s);
      v.values[i] = (a * x_t.values[i] - x0_hat) / s;
    } else {
      // sigma = 0 convention: v points from mu toward x_t.
      v.values[i] = a * (x_t.values[i] - mu_.values[i]);
    }
  }
  return v;
}

LatentTensor q_sample(const LatentTensor& x0, int t, const LatentTensor& eps,
                      const NoiseSchedule& sched) {
  require_same_shape(x0, eps);
  const double a = sched.alpha(t);
  const double s = sched.sigma(t);
  LatentTensor x_t(x0.h, x0.w, x0.c);
  for (size_t i = 0; i < x_t.size(); ++i)
    x_t.values[i] = a * x0.values[i] + s * eps.values[i];
  return x_t;
}

LatentTensor v_target(const LatentTensor& x0, const LatentTensor& eps, int t,
                      const NoiseSchedule& sched, VParameterization param) {
  require_same_shape(x0, eps);
  const double a = sched.alpha(t);
  const double s = sched.sigma(t);
  LatentTensor v(x0.h, x0.w, x0.c);
  if (param == VParameterization::Standard) {
    for (size_t i = 0; i < v.size(); ++i)
      v.values[i] = a * eps.values[i] - s * x0.values[i];
  } else {
    // As-printed variant: x_t in place of x0.
    for (size_t i = 0; i < v.size(); ++i) {
      double x_t = a * x0.values[i] + s * eps.values[i];
      v.values[i] = a * eps.values[i] - s * x_t;
    }
  }
  return v;
}

VDecomposition from_v(const LatentTensor& x_t, const LatentTensor& v, int t,
                      const NoiseSchedule& sched) {
  require_same_shape(x_t, v);
  const double a = sched.alpha(t);
  const double s = sched.sigma(t);
  VDecomposition out{LatentTensor(x_t.h, x_t.w, x_t.c),
                     LatentTensor(x_t.h, x_t.w, x_t.c)};
  for (size_t i = 0; i < x_t.size(); ++i) {
    out.x0_hat.values[i] = a * x_t.values[i] - s * v.values[i];
    out.eps_hat.values[i] = s * x_t.values[i] + a * v.values[i];
  }
  return out;
}

LatentTensor ddim_step(const LatentTensor& x_t, const LatentTensor& v_hat,
                       int t, int s, double eta, const NoiseSchedule& sched,
                       Rng& rng) {
  require(s < t, "ddim_step requires s < t");
  VDecomposition d = from_v(x_t, v_hat, t, sched);
  const double a_s = sched.alpha(s);
  const double sig_s = sched.sigma(s);

  double sigma_tilde = 0.0;
  if (eta > 0.0 && sched.alpha_bar(t) < 1.0) {
    double ab_t = sched.alpha_bar(t);
    double ab_s = sched.alpha_bar(s);
    sigma_tilde = eta * std::sqrt((1.0 - ab_s) / (1.0 - ab_t)) *
                  std::sqrt(1.0 - ab_t / ab_s);
  }
  // Direction term keeps total variance at sigma(s)^2 when noise is injected.
  double dir = std::sqrt(std::max(0.0, sig_s * sig_s - sigma_tilde * sigma_tilde));

  LatentTensor x_s(x_t.h, x_t.w, x_t.c);
  for (size_t i = 0; i < x_s.size(); ++i) {
    double noise = sigma_tilde > 0.0 ? rng.normal() : 0.0;
    x_s.values[i] = a_s * d.x0_hat.values[i] + dir * d.eps_hat.values[i] +
                    sigma_tilde * noise;
  }
  return x_s;
}

std::vector<int> sample_timesteps(const NoiseSchedule& sched, int num_steps) {
  const int T = sched.T();
  std::vector<int> steps(num_steps + 1);
  for (int i = 0; i <= num_steps; ++i) {
    double frac = 1.0 - static_cast<double>(i) / num_steps;
    steps[i] = static_cast<int>(std::lround(frac * T));
  }
  steps.front() = T;
  steps.back() = 0;
  // Collapse rounding duplicates while keeping the sequence strictly
  // descending (only possible when num_steps is close to T).
  for (size_t i = 1; i < steps.size(); ++i)
    if (steps[i] >= steps[i - 1]) steps[i] = steps[i - 1] - 1;
  require(steps.back() >= 0, "timestep subset underflow");
  return steps;
}

LatentTensor sample(const Denoiser& denoiser, const ConditionStack& cond,
                    const NoiseSchedule& sched, const SampleConfig& cfg) {
  cfg.validate(sched);
  auto [h, w, c] = denoiser.latent_shape(cond);

  // x_T keyed by (seed, stream 0); per-step noise streams are 1..num_steps.
  LatentTensor x(h, w, c);
  for (size_t i = 0; i < x.size(); ++i)
    x.values[i] = normal_at(cfg.seed, 0, i);

  std::vector<int> steps = sample_timesteps(sched, cfg.num_steps);
  LatentTensor x0_hat;
  for (size_t k = 0; k + 1 < steps.size(); ++k) {
    int t = steps[k];
    int s = steps[k + 1];
    LatentTensor v_hat = denoiser.predict_v(x, t, cond);
    require(v_hat.same_shape(x), "denoiser output shape mismatch");
    x0_hat = from_v(x, v_hat, t, sched).x0_hat;
    Rng step_rng(cfg.seed, k + 1);
    x = ddim_step(x, v_hat, t, s, cfg.eta, sched, step_rng);
  }
  return x0_hat;
}

}  // namespace streetforge
