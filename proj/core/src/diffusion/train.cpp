#include "streetforge/diffusion/train.hpp"

#include <cmath>
#include <fstream>

#include "streetforge/adam.hpp"

namespace streetforge {

std::vector<double> LossTrace::smoothed(int window) const {
  std::vector<double> out(raw.size());
  double acc = 0.0;
  for (size_t i = 0; i < raw.size(); ++i) {
    acc += raw[i];
    if (i >= static_cast<size_t>(window)) acc -= raw[i - window];
    out[i] = acc / std::min<size_t>(i + 1, window);
  }
  return out;
}

void LossTrace::write_csv(const std::string& path) const {
  std::ofstream out(path);
  require(out.good(), "cannot open for write: " + path);
  out << "step,loss\n";
  for (size_t i = 0; i < raw.size(); ++i) out << i << "," << raw[i] << "\n";
}

LossTrace train_denoiser(TinyDenoiser& model, const ExampleSampler& dataset,
                         const NoiseSchedule& sched, const TrainConfig& cfg) {
  require(cfg.steps >= 1, "steps must be >= 1");
  Adam opt(cfg.lr);
  Eigen::VectorXd params = model.parameters();
  Eigen::VectorXd grad(model.param_count());
  LossTrace trace;
  trace.raw.reserve(cfg.steps);

  Rng rng(cfg.seed);
  for (int step = 0; step < cfg.steps; ++step) {
    TrainExample ex = dataset(rng);
    int t = 1 + static_cast<int>(rng.uniform_index(sched.T()));

    LatentTensor eps(ex.x0.h, ex.x0.w, ex.x0.c);
    for (double& v : eps.values) v = rng.normal();

    LatentTensor x_t = q_sample(ex.x0, t, eps, sched);
    LatentTensor target = cfg.objective == TrainObjective::V
                              ? v_target(ex.x0, eps, t, sched, cfg.v_param)
                              : eps;

    double loss = model.loss_and_gradient(x_t, t, ex.cond, target, grad);
    if (!std::isfinite(loss))
      throw NumericalError("non-finite training loss at step " + std::to_string(step));
    trace.raw.push_back(loss);

    opt.step(params, grad);
    model.set_parameters(params);
  }
  return trace;
}

}  // namespace streetforge
