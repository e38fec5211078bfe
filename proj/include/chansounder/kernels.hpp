// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chansounder/types.hpp"

// Hot inner loops shared by the detector, correlator and channel simulator.
// Every parallel kernel has a serial twin in kernels::serial with identical
// arithmetic (the OpenMP versions only distribute independent output elements
// across threads, so results are bit-identical).  The serial versions are the
// reference implementations used by the equivalence tests and the benchmark.

namespace chansounder::kernels {

// out[k] = sum_n x[offset + k + n] * conj(ref[n]) for k = 0 .. out.size()-1.
// Indices that fall outside x contribute zero (the tail of a correlation
// window past the end of the capture is treated as silence).
void lag_correlate(std::span<const cplx> x, std::span<const cplx> ref,
                   long offset, std::span<cplx> out);

// out[o] = sum_n x[o + n] * conj(ref[n]) for o = 0 .. x.size() - ref.size().
// Requires x.size() >= ref.size() and out.size() == x.size() - ref.size() + 1.
void sliding_correlate(std::span<const cplx> x, std::span<const cplx> ref,
                       std::span<cplx> out);

// Aperiodic autocorrelation r[lag] = sum_n x[n + lag] * conj(x[n]) for
// lag = -(N-1) .. N-1, returned packed so that index (lag + N - 1) holds
// r[lag].  Negative lags follow from Hermitian symmetry r[-k] = conj(r[k]).
std::vector<cplx> autocorrelate(std::span<const cplx> x);

// out[o] = sum_{n=0}^{window-1} |x[o + n]|^2 via a prefix sum; o ranges over
// 0 .. x.size() - window.  Deterministic regardless of thread count.
void sliding_energy(std::span<const cplx> x, std::size_t window,
                    std::span<double> out);

namespace serial {

void lag_correlate(std::span<const cplx> x, std::span<const cplx> ref,
                   long offset, std::span<cplx> out);
void sliding_correlate(std::span<const cplx> x, std::span<const cplx> ref,
                       std::span<cplx> out);
std::vector<cplx> autocorrelate(std::span<const cplx> x);

}  // namespace serial

}  // namespace chansounder::kernels
