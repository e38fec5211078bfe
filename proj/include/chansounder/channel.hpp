// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>

#include "chansounder/types.hpp"

// Known-channel simulation: convolve a transmit waveform with a configured
// CIR, add carrier frequency offset, timing offset and calibrated AWGN.
// Everything is deterministic given the noise seed.

namespace chansounder::channel {

enum class TapInterp {
  kInteger,       // tap delays must land on the sample grid
  kWindowedSinc,  // fractional delays via a Hann-windowed sinc interpolator
};

struct ChannelConfig {
  Cir cir;
  double snr_db = std::numeric_limits<double>::infinity();
  double cfo_hz = 0.0;
  long timing_offset_samples = 0;
  std::uint64_t noise_seed = 0;
  TapInterp interp = TapInterp::kInteger;
};

// y[n] = sum_k h[k] * x[n - d_k].  Output is extended so the full tail of
// the longest delay is kept.  In integer mode every tap delay
// (cir.start_offset_s + k * cir.tap_spacing_s) * sample_rate must be within
// 1e-6 samples of an integer, otherwise an Error suggests kWindowedSinc.
IqBuffer apply_cir(const IqBuffer& in, const Cir& cir,
                   TapInterp interp = TapInterp::kInteger);

// Multiply by exp(j*2*pi*cfo_hz*n/fs).  The phase argument is reduced with
// fmod before the complex exponential, so cfo_hz == fs gives back the input
// exactly.
IqBuffer apply_cfo(const IqBuffer& in, double cfo_hz);

// Additive white Gaussian noise with per-complex-sample variance
// mean(|x|^2) / 10^(snr_db/10), measured over the full extent of the input
// buffer.  snr_db == +inf returns the input unchanged without consuming the
// seed.
IqBuffer add_awgn(const IqBuffer& in, double snr_db, std::uint64_t seed);

// Full chain, in this order: prepend timing_offset_samples zeros ->
// apply_cir -> apply_cfo -> add_awgn.  The SNR is therefore defined against
// the mean power of the post-channel signal over its full extent, padding
// included, and noise covers the entire output buffer.
IqBuffer simulate(const IqBuffer& tx, const ChannelConfig& cfg);

}  // namespace chansounder::channel
