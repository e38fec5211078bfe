// SPDX-License-Identifier: Apache-2.0
#include <complex>
#include <cstring>
#include <vector>

#include <doctest.h>

#include "chansounder/kernels.hpp"
#include "chansounder/rng.hpp"
#include "chansounder/types.hpp"

using chansounder::cplx;
namespace k = chansounder::kernels;

namespace {

std::vector<cplx> random_signal(std::size_t n, std::uint64_t seed) {
  chansounder::rng::SplitMix64 gen(seed);
  std::vector<cplx> out(n);
  for (auto& v : out) {
    const auto [re, im] = chansounder::rng::gaussian_pair(gen);
    v = {re, im};
  }
  return out;
}

// Straight-line reference: out[k] = sum_n x[offset+k+n] * conj(ref[n]) with
// zero for indices outside x.
cplx naive_lag(const std::vector<cplx>& x, const std::vector<cplx>& ref,
               long offset, long lag) {
  cplx acc{0.0, 0.0};
  for (std::size_t n = 0; n < ref.size(); ++n) {
    const long i = offset + lag + static_cast<long>(n);
    if (i < 0 || i >= static_cast<long>(x.size())) continue;
    acc += x[static_cast<std::size_t>(i)] * std::conj(ref[n]);
  }
  return acc;
}

}  // namespace

TEST_CASE("lag_correlate matches the naive double loop") {
  const auto x = random_signal(300, 11);
  const auto ref = random_signal(48, 22);
  std::vector<cplx> out(40);
  k::lag_correlate(x, ref, 17, out);
  for (std::size_t lag = 0; lag < out.size(); ++lag) {
    const cplx want = naive_lag(x, ref, 17, static_cast<long>(lag));
    CHECK(std::abs(out[lag] - want) <= 1e-12 * (1.0 + std::abs(want)));
  }
}

TEST_CASE("lag_correlate zero-pads outside the buffer") {
  const auto x = random_signal(64, 33);
  const auto ref = random_signal(32, 44);

  // Negative offsets and windows running past the end must both match the
  // zero-padded naive sum, and far-out windows are exactly zero.
  std::vector<cplx> out(8);
  k::lag_correlate(x, ref, -16, out);
  for (std::size_t lag = 0; lag < out.size(); ++lag) {
    const cplx want = naive_lag(x, ref, -16, static_cast<long>(lag));
    CHECK(std::abs(out[lag] - want) <= 1e-12 * (1.0 + std::abs(want)));
  }
  k::lag_correlate(x, ref, 60, out);
  for (std::size_t lag = 0; lag < out.size(); ++lag) {
    const cplx want = naive_lag(x, ref, 60, static_cast<long>(lag));
    CHECK(std::abs(out[lag] - want) <= 1e-12 * (1.0 + std::abs(want)));
  }
  k::lag_correlate(x, ref, 1000, out);
  for (const auto& v : out) CHECK(v == cplx{0.0, 0.0});
}

TEST_CASE("sliding_correlate equals lag_correlate at every offset") {
  const auto x = random_signal(256, 55);
  const auto ref = random_signal(64, 66);
  std::vector<cplx> slide(x.size() - ref.size() + 1);
  k::sliding_correlate(x, ref, slide);
  std::vector<cplx> one(1);
  for (std::size_t o = 0; o < slide.size(); ++o) {
    k::lag_correlate(x, ref, static_cast<long>(o), one);
    CHECK(slide[o] == one[0]);
  }
}

TEST_CASE("autocorrelate packing and Hermitian symmetry") {
  const auto x = random_signal(40, 77);
  const long n = static_cast<long>(x.size());
  const auto r = k::autocorrelate(x);
  REQUIRE(static_cast<long>(r.size()) == 2 * n - 1);

  // Naive r[lag] for positive lags; negative lags via conjugate symmetry.
  for (long lag = 0; lag < n; ++lag) {
    cplx want{0.0, 0.0};
    for (long i = 0; i + lag < n; ++i) {
      want += x[static_cast<std::size_t>(i + lag)] *
              std::conj(x[static_cast<std::size_t>(i)]);
    }
    const cplx got_pos = r[static_cast<std::size_t>(lag + n - 1)];
    const cplx got_neg = r[static_cast<std::size_t>(-lag + n - 1)];
    CHECK(std::abs(got_pos - want) <= 1e-12 * (1.0 + std::abs(want)));
    CHECK(got_neg == std::conj(got_pos));
  }
}

TEST_CASE("parallel kernels are bit-identical to the serial references") {
  const auto x = random_signal(2048, 88);
  const auto ref = random_signal(257, 99);

  std::vector<cplx> a(x.size() - ref.size() + 1), b(a.size());
  k::serial::sliding_correlate(x, ref, a);
  k::sliding_correlate(x, ref, b);
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0);

  std::vector<cplx> la(96), lb(96);
  k::serial::lag_correlate(x, ref, -31, la);
  k::lag_correlate(x, ref, -31, lb);
  CHECK(std::memcmp(la.data(), lb.data(), la.size() * sizeof(cplx)) == 0);

  const auto ra = k::serial::autocorrelate(ref);
  const auto rb = k::autocorrelate(ref);
  REQUIRE(ra.size() == rb.size());
  CHECK(std::memcmp(ra.data(), rb.data(), ra.size() * sizeof(cplx)) == 0);
}

TEST_CASE("sliding_energy matches the direct sum") {
  const auto x = random_signal(512, 111);
  const std::size_t window = 100;
  std::vector<double> e(x.size() - window + 1);
  k::sliding_energy(x, window, e);
  for (std::size_t o = 0; o < e.size(); ++o) {
    double want = 0.0;
    for (std::size_t n2 = 0; n2 < window; ++n2) want += std::norm(x[o + n2]);
    CHECK(e[o] == doctest::Approx(want).epsilon(1e-12));
  }
}
