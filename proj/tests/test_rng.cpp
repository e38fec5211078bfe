// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdint>

#include <doctest.h>

#include "chansounder/rng.hpp"

using chansounder::rng::SplitMix64;

TEST_CASE("SplitMix64 reference vectors") {
  // First outputs of the public-domain reference implementation.
  SplitMix64 g0(0);
  CHECK(g0.next() == 0xE220A8397B1DCDAFull);
  CHECK(g0.next() == 0x6E789E6AA1B965F4ull);
  CHECK(g0.next() == 0x06C45D188009454Full);

  SplitMix64 g42(42);
  CHECK(g42.next() == 0xBDD732262FEB6E95ull);
  CHECK(g42.next() == 0x28EFE333B266F103ull);
  CHECK(g42.next() == 0x47526757130F9F52ull);
}

TEST_CASE("uniform ranges") {
  SplitMix64 g(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = g.uniform_pos();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
    const double v = g.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("gaussian_pair frozen values for seed 42") {
  // Box-Muller on the SplitMix64 stream, checked against an independent
  // implementation of the same documented recipe.
  SplitMix64 g(42);
  const auto [a0, b0] = chansounder::rng::gaussian_pair(g);
  CHECK(a0 == doctest::Approx(0.4147197504315305).epsilon(1e-14));
  CHECK(b0 == doctest::Approx(0.6526812221519427).epsilon(1e-14));
  const auto [a1, b1] = chansounder::rng::gaussian_pair(g);
  CHECK(a1 == doctest::Approx(-0.8918862136277562).epsilon(1e-14));
  CHECK(b1 == doctest::Approx(1.3268335628141064).epsilon(1e-14));
}

TEST_CASE("gaussian sample moments") {
  SplitMix64 g(123);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n / 2; ++i) {
    const auto [a, b] = chansounder::rng::gaussian_pair(g);
    sum += a + b;
    sum2 += a * a + b * b;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}
