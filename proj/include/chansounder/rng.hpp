// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

// Self-contained deterministic RNG so that simulated captures are
// reproducible bit-for-bit across platforms and standard-library versions
// (std::mt19937 + std::normal_distribution make no cross-implementation
// guarantee).  The exact algorithm is documented in docs/formats.md.

namespace chansounder::rng {

// SplitMix64 (public domain constants from the reference implementation).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in (0, 1]: top 53 bits, shifted into (0,1] so that
  // log() below is always finite.
  double uniform_pos() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// One Box-Muller transform: two independent N(0,1) draws from two uniforms.
// Consumes exactly two SplitMix64 outputs per call, in a fixed order.
inline std::pair<double, double> gaussian_pair(SplitMix64& gen) {
  const double u1 = gen.uniform_pos();
  const double u2 = gen.uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace chansounder::rng
