#pragma once

#include <cmath>
#include <vector>

#include "streetforge/common.hpp"

namespace streetforge {

constexpr int kDefaultDiffusionSteps = 1000;

// Variance-preserving noise schedule: a table of alpha_bar values for
// t = 1..T, with alpha_bar(0) = 1 by convention. alpha(t)^2 + sigma(t)^2 = 1
// identically.
class NoiseSchedule {
 public:
  explicit NoiseSchedule(std::vector<double> alpha_bar)
      : alpha_bar_(std::move(alpha_bar)) {
    require(!alpha_bar_.empty(), "schedule needs at least one step");
    double prev = 1.0;
    for (double ab : alpha_bar_) {
      require(ab > 0.0 && ab <= 1.0 && ab < prev,
              "alpha_bar must be strictly decreasing within (0,1]");
      prev = ab;
    }
  }

  int T() const { return static_cast<int>(alpha_bar_.size()); }

  double alpha_bar(int t) const {
    require(t >= 0 && t <= T(), "step out of range");
    return t == 0 ? 1.0 : alpha_bar_[t - 1];
  }

  double alpha(int t) const { return std::sqrt(alpha_bar(t)); }
  double sigma(int t) const { return std::sqrt(1.0 - alpha_bar(t)); }

 private:
  std::vector<double> alpha_bar_;
};

// Linear-beta DDPM schedule, beta from 1e-4 to 2e-2 over T steps.
NoiseSchedule make_ddpm_schedule(int T = kDefaultDiffusionSteps);

// FNV-1a digest of the alpha_bar table, hex-encoded; stored next to trained
// weights so a model is never resumed against a different schedule.
std::string schedule_digest(const NoiseSchedule& sched);

}  // namespace streetforge
