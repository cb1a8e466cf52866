#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "collasprite/common.hpp"

namespace collasprite {

// Wraps std::mt19937_64 with stateless draw helpers so that every sample is a
// pure function of the engine state. Checkpoints persist the state string and
// restore the exact continuation.
class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  uint64_t uniform_int(uint64_t n) {
    require(n > 0, "uniform_int: n must be positive");
    // Rejection sampling keeps the distribution exact for any n.
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Standard normal via Box-Muller. Draws two uniforms per call and keeps no
  // hidden state, so serialization stays a pure engine dump.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Derives an independent child generator; consumes one draw.
  Rng fork(uint64_t salt) {
    uint64_t s = next_u64() ^ (salt * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL);
    return Rng(s);
  }

  std::string save_state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  void load_state(const std::string& state) {
    std::istringstream is(state);
    is >> engine_;
    require(!is.fail(), "rng: malformed state string");
  }

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

// Deterministic per-item seed derivation (splitmix64 finalizer).
inline uint64_t mix_seed(uint64_t seed, uint64_t item) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (item + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace collasprite
