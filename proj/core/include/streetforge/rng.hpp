#pragma once

#include <cmath>
#include <cstdint>

namespace streetforge {

// Counter-based deterministic RNG. Every draw is a pure function of
// (seed, stream, index), so parallel fills are reproducible regardless of
// evaluation order and a consumer can be re-run bit-identically from its key.

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix3(uint64_t seed, uint64_t stream, uint64_t index) {
  uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (stream + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (index + 0x9e3779b97f4a7c15ULL));
  return h;
}

}  // namespace detail

// Uniform in [0,1) from a (seed, stream, index) key.
inline double uniform_at(uint64_t seed, uint64_t stream, uint64_t index) {
  // 53 random mantissa bits.
  return static_cast<double>(detail::mix3(seed, stream, index) >> 11) *
         0x1.0p-53;
}

// Standard normal from a (seed, stream, index) key (Box-Muller, one branch).
inline double normal_at(uint64_t seed, uint64_t stream, uint64_t index) {
  double u1 = uniform_at(seed, stream, 2 * index);
  double u2 = uniform_at(seed, stream, 2 * index + 1);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

// Sequential view over the counter-based generator. Copyable; two copies
// advanced identically produce identical draws.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  double uniform() { return uniform_at(seed_, stream_, counter_++); }
  double normal() { return normal_at(seed_, stream_, counter_++); }

  // Uniform integer in [0, n).
  uint64_t uniform_index(uint64_t n) {
    return static_cast<uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  // Independent substream; draws never collide with the parent's.
  Rng fork(uint64_t substream) const {
    return Rng(detail::mix3(seed_, stream_, ~substream), substream);
  }

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  uint64_t stream_;
  uint64_t counter_ = 0;
};

}  // namespace streetforge
