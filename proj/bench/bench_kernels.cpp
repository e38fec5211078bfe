// SPDX-License-Identifier: Apache-2.0
//
// Benchmark: OpenMP kernels vs the serial reference implementations.
// Prints wall times and verifies that both paths produce bit-identical
// output on the same data (they share the per-element arithmetic).

#include <chrono>
#include <complex>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "chansounder/kernels.hpp"
#include "chansounder/rng.hpp"
#include "chansounder/types.hpp"

namespace {

using chansounder::cplx;

double now_s() {
#ifdef _OPENMP
  return omp_get_wtime();
#else
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
#endif
}

std::vector<cplx> random_signal(std::size_t n, std::uint64_t seed) {
  chansounder::rng::SplitMix64 gen(seed);
  std::vector<cplx> out(n);
  for (auto& v : out) {
    const auto [re, im] = chansounder::rng::gaussian_pair(gen);
    v = {re, im};
  }
  return out;
}

template <typename T>
bool bit_identical(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() &&
         (a.empty() ||
          std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0);
}

struct Result {
  double serial_s = 1e300;
  double parallel_s = 1e300;
  bool identical = false;
};

// Runs both closures once to warm up and check equality of their outputs,
// then keeps the best wall time over `reps` runs of each.
template <typename SerialFn, typename ParallelFn>
Result time_pair(int reps, SerialFn serial, ParallelFn parallel) {
  Result r;
  r.identical = bit_identical(serial(), parallel());
  for (int i = 0; i < reps; ++i) {
    double t = now_s();
    (void)serial();
    r.serial_s = std::min(r.serial_s, now_s() - t);
    t = now_s();
    (void)parallel();
    r.parallel_s = std::min(r.parallel_s, now_s() - t);
  }
  return r;
}

void report(const char* name, const Result& r) {
  std::printf(
      "%-24s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   %s\n",
      name, r.serial_s * 1e3, r.parallel_s * 1e3, r.serial_s / r.parallel_s,
      r.identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t rx_len = 1u << 17;
  int reps = 5;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--quick") {
      rx_len = 1u << 14;
      reps = 2;
    } else {
      std::fprintf(stderr, "usage: %s [--quick]\n", argv[0]);
      return 2;
    }
  }
  const std::size_t ref_len = std::min<std::size_t>(2816, rx_len / 4);

#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled at build time; both paths are serial\n");
#endif
  std::printf("rx length %zu, reference length %zu, best of %d reps\n\n",
              rx_len, ref_len, reps);

  const auto rx = random_signal(rx_len, 0x6b6e6f636bULL);
  const auto ref = random_signal(ref_len, 0x7265666572ULL);
  namespace k = chansounder::kernels;

  {
    std::vector<cplx> a(rx.size() - ref.size() + 1), b(a.size());
    report("sliding_correlate",
           time_pair(
               reps,
               [&]() -> const std::vector<cplx>& {
                 k::serial::sliding_correlate(rx, ref, a);
                 return a;
               },
               [&]() -> const std::vector<cplx>& {
                 k::sliding_correlate(rx, ref, b);
                 return b;
               }));
  }

  {
    std::vector<cplx> a(256), b(256);
    report("lag_correlate(256)",
           time_pair(
               reps,
               [&]() -> const std::vector<cplx>& {
                 k::serial::lag_correlate(rx, ref, 64, a);
                 return a;
               },
               [&]() -> const std::vector<cplx>& {
                 k::lag_correlate(rx, ref, 64, b);
                 return b;
               }));
  }

  {
    std::vector<cplx> a, b;
    report("autocorrelate(ref)",
           time_pair(
               reps,
               [&]() -> const std::vector<cplx>& {
                 a = k::serial::autocorrelate(ref);
                 return a;
               },
               [&]() -> const std::vector<cplx>& {
                 b = k::autocorrelate(ref);
                 return b;
               }));
  }

  {
    // sliding_energy has a single deterministic prefix-sum implementation;
    // compare it against the naive direct sum it replaces.  Different
    // summation order means equality only up to rounding, so this row
    // reports the max relative difference instead of bit-identity.
    std::vector<double> a(rx.size() - ref.size() + 1), b(a.size());
    const auto naive = [&]() {
      for (std::size_t o = 0; o < a.size(); ++o) {
        double acc = 0.0;
        for (std::size_t n = 0; n < ref.size(); ++n) {
          acc += std::norm(rx[o + n]);
        }
        a[o] = acc;
      }
    };
    naive();
    k::sliding_energy(rx, ref.size(), b);
    double max_rel = 0.0;
    for (std::size_t o = 0; o < a.size(); ++o) {
      max_rel = std::max(max_rel, std::abs(a[o] - b[o]) / a[o]);
    }
    double naive_s = 1e300, prefix_s = 1e300;
    for (int i = 0; i < reps; ++i) {
      double t = now_s();
      naive();
      naive_s = std::min(naive_s, now_s() - t);
      t = now_s();
      k::sliding_energy(rx, ref.size(), b);
      prefix_s = std::min(prefix_s, now_s() - t);
    }
    std::printf(
        "%-24s naive  %9.3f ms   prefix   %9.3f ms   speedup %5.2fx   "
        "max rel diff %.2e\n",
        "sliding_energy", naive_s * 1e3, prefix_s * 1e3, naive_s / prefix_s,
        max_rel);
  }

  return 0;
}
