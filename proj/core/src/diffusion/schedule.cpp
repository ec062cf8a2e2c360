#include "streetforge/diffusion/schedule.hpp"

#include <cstdint>
#include <cstring>

namespace streetforge {

NoiseSchedule make_ddpm_schedule(int T) {
  require(T >= 1, "T must be >= 1");
  const double beta_start = 1e-4;
  const double beta_end = 2e-2;
  std::vector<double> alpha_bar(T);
  double running = 1.0;
  for (int t = 1; t <= T; ++t) {
    double beta = T == 1 ? beta_start
                         : beta_start + (beta_end - beta_start) * (t - 1) / (T - 1);
    running *= 1.0 - beta;
    alpha_bar[t - 1] = running;
  }
  return NoiseSchedule(std::move(alpha_bar));
}

std::string schedule_digest(const NoiseSchedule& sched) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* data, size_t n) {
    const unsigned char* bytes = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (int t = 1; t <= sched.T(); ++t) {
    double ab = sched.alpha_bar(t);
    feed(&ab, sizeof(ab));
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace streetforge
