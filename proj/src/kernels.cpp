// SPDX-License-Identifier: Apache-2.0
#include "chansounder/kernels.hpp"

#include <algorithm>

namespace chansounder::kernels {

namespace {

// Single correlation lag with zero padding outside x.  Shared by the serial
// and parallel front ends so both produce identical rounding.
inline cplx one_lag(std::span<const cplx> x, std::span<const cplx> ref,
                    long start) {
  const long n_lo = std::max(0L, -start);
  const long n_hi = std::min(static_cast<long>(ref.size()),
                             static_cast<long>(x.size()) - start);
  cplx acc{0.0, 0.0};
  for (long n = n_lo; n < n_hi; ++n) {
    acc += x[static_cast<std::size_t>(start + n)] * std::conj(ref[n]);
  }
  return acc;
}

inline cplx one_auto_lag(std::span<const cplx> x, std::size_t lag) {
  cplx acc{0.0, 0.0};
  for (std::size_t n = 0; n + lag < x.size(); ++n) {
    acc += x[n + lag] * std::conj(x[n]);
  }
  return acc;
}

}  // namespace

void lag_correlate(std::span<const cplx> x, std::span<const cplx> ref,
                   long offset, std::span<cplx> out) {
  const long nk = static_cast<long>(out.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < nk; ++k) {
    out[k] = one_lag(x, ref, offset + k);
  }
}

void sliding_correlate(std::span<const cplx> x, std::span<const cplx> ref,
                       std::span<cplx> out) {
  detail::require(x.size() >= ref.size(),
                  "sliding_correlate: signal shorter than reference");
  detail::require(out.size() == x.size() - ref.size() + 1,
                  "sliding_correlate: bad output size");
  const long no = static_cast<long>(out.size());
#pragma omp parallel for schedule(static)
  for (long o = 0; o < no; ++o) {
    out[o] = one_lag(x, ref, o);
  }
}

std::vector<cplx> autocorrelate(std::span<const cplx> x) {
  const long n = static_cast<long>(x.size());
  detail::require(n > 0, "autocorrelate: empty input");
  std::vector<cplx> full(2 * x.size() - 1);
#pragma omp parallel for schedule(dynamic, 16)
  for (long lag = 0; lag < n; ++lag) {
    full[static_cast<std::size_t>(lag) + x.size() - 1] =
        one_auto_lag(x, static_cast<std::size_t>(lag));
  }
  for (long lag = 1; lag < n; ++lag) {
    full[x.size() - 1 - static_cast<std::size_t>(lag)] =
        std::conj(full[static_cast<std::size_t>(lag) + x.size() - 1]);
  }
  return full;
}

void sliding_energy(std::span<const cplx> x, std::size_t window,
                    std::span<double> out) {
  detail::require(window > 0 && window <= x.size(),
                  "sliding_energy: bad window");
  detail::require(out.size() == x.size() - window + 1,
                  "sliding_energy: bad output size");
  // Prefix sums keep this O(N) and independent of the thread count.
  std::vector<double> prefix(x.size() + 1, 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    prefix[n + 1] = prefix[n] + std::norm(x[n]);
  }
  for (std::size_t o = 0; o < out.size(); ++o) {
    out[o] = prefix[o + window] - prefix[o];
  }
}

namespace serial {

void lag_correlate(std::span<const cplx> x, std::span<const cplx> ref,
                   long offset, std::span<cplx> out) {
  for (long k = 0; k < static_cast<long>(out.size()); ++k) {
    out[k] = one_lag(x, ref, offset + k);
  }
}

void sliding_correlate(std::span<const cplx> x, std::span<const cplx> ref,
                       std::span<cplx> out) {
  detail::require(x.size() >= ref.size(),
                  "sliding_correlate: signal shorter than reference");
  detail::require(out.size() == x.size() - ref.size() + 1,
                  "sliding_correlate: bad output size");
  for (long o = 0; o < static_cast<long>(out.size()); ++o) {
    out[o] = one_lag(x, ref, o);
  }
}

std::vector<cplx> autocorrelate(std::span<const cplx> x) {
  const long n = static_cast<long>(x.size());
  detail::require(n > 0, "autocorrelate: empty input");
  std::vector<cplx> full(2 * x.size() - 1);
  for (long lag = 0; lag < n; ++lag) {
    full[static_cast<std::size_t>(lag) + x.size() - 1] =
        one_auto_lag(x, static_cast<std::size_t>(lag));
  }
  for (long lag = 1; lag < n; ++lag) {
    full[x.size() - 1 - static_cast<std::size_t>(lag)] =
        std::conj(full[static_cast<std::size_t>(lag) + x.size() - 1]);
  }
  return full;
}

}  // namespace serial

}  // namespace chansounder::kernels
