#pragma once

#include <Eigen/Dense>

#include "streetforge/common.hpp"

namespace streetforge {

// Plain Adam over a flat parameter vector.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    require(params.size() == grad.size(), "adam parameter/gradient size mismatch");
    if (m_.size() != params.size()) {
      m_ = Eigen::VectorXd::Zero(params.size());
      v_ = Eigen::VectorXd::Zero(params.size());
    }
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
    double c1 = 1.0 - std::pow(beta1_, t_);
    double c2 = 1.0 - std::pow(beta2_, t_);
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      double mhat = m_[i] / c1;
      double vhat = v_[i] / c2;
      params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }

  // Rebuilds moment state after the parameter vector was compacted or grown:
  // old_of_new[i] is the previous row feeding new row i, or -1 for a fresh
  // (zero-state) parameter.
  void reindex(const std::vector<Eigen::Index>& old_of_new) {
    if (m_.size() == 0) return;
    Eigen::VectorXd m2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(old_of_new.size()));
    Eigen::VectorXd v2 = Eigen::VectorXd::Zero(m2.size());
    for (size_t i = 0; i < old_of_new.size(); ++i) {
      if (old_of_new[i] < 0) continue;
      m2[static_cast<Eigen::Index>(i)] = m_[old_of_new[i]];
      v2[static_cast<Eigen::Index>(i)] = v_[old_of_new[i]];
    }
    m_ = std::move(m2);
    v_ = std::move(v2);
  }

  double lr() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  Eigen::VectorXd m_, v_;
};

}  // namespace streetforge
