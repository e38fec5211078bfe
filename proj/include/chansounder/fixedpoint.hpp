// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chansounder/types.hpp"
#include "chansounder/waveform.hpp"

// Bit-accurate model of a small-FPGA fixed-point correlator: quantized
// inputs, integer products, bounded saturating accumulators.  Used to
// quantify quantization loss against the floating-point estimator path.

namespace chansounder::fixedpoint {

enum class Overflow { kSaturate, kWrap };
enum class Rounding { kRoundHalfEven, kTruncate };

struct FixedPointFormat {
  int total_bits = 12;
  int frac_bits = 10;
  Overflow overflow = Overflow::kSaturate;
  Rounding rounding = Rounding::kRoundHalfEven;

  friend bool operator==(const FixedPointFormat&,
                         const FixedPointFormat&) = default;
};

// Default hardware profile: 12-bit samples, 24-bit saturating accumulator.
// The modeled platform's actual widths are unknown, so this is an explicit
// model choice, configurable everywhere.
inline constexpr FixedPointFormat kDefaultFormat{};
inline constexpr int kDefaultAccBits = 24;

struct FixedComplex {
  std::int32_t re_raw = 0;
  std::int32_t im_raw = 0;
  FixedPointFormat format;
};

// Raw complex accumulator for one lag plus the number of overflow events
// (saturations or wraps) that occurred while accumulating it.
struct FixedAccumulator {
  std::int64_t re = 0;
  std::int64_t im = 0;
  std::uint32_t overflow_events = 0;
};

struct FixedFloatReport {
  double max_abs_err = 0.0;  // vs the float path, normalized-corr units
  double sqnr_db = 0.0;      // signal-to-quantization-noise ratio
  std::uint64_t overflow_events = 0;
};

void validate_format(const FixedPointFormat& fmt);
std::int32_t max_raw(const FixedPointFormat& fmt);  //  2^(total-1) - 1
std::int32_t min_raw(const FixedPointFormat& fmt);  // -2^(total-1)

// round(v * 2^frac_bits) per fmt.rounding, then clipped or wrapped per
// fmt.overflow.  Round-half-even relies on the default FE_TONEAREST mode.
std::int32_t quantize_value(double v, const FixedPointFormat& fmt);

std::vector<FixedComplex> quantize(const IqBuffer& sig,
                                   const FixedPointFormat& fmt);

cplx to_float(const FixedComplex& q);

// acc[k] = sum_n rx_q[offset+k+n] * conj(ref_q[n]) in exact integer
// arithmetic: products in 2x total_bits, every partial-sum add saturated (or
// wrapped, per the rx format's overflow policy) to acc_bits two's-complement
// range.  The accumulation order per lag is fixed: for each n ascending,
// re += a*c, re += b*d, im += b*c, im -= a*d.  Requires
// acc_bits in [2*total_bits, 64]; the whole window must fit in rx_q.
std::vector<FixedAccumulator> fixed_correlate(
    std::span<const FixedComplex> rx_q, std::span<const FixedComplex> ref_q,
    long offset, int window_taps, int acc_bits);

// Reference chips quantized to unit codes (+1/-1 raw): multiplying by a chip
// is then exactly the add/subtract despreader a small FPGA implements, and
// the accumulator only needs log2(N) bits of headroom over the sample width.
// (Storing chips at +/-max code would scale every product by the max code
// and overflow any <= 64-bit accumulator on the 2816-sample reference at
// wide formats.)  Requires a rectangular-pulse reference with +/-1 samples.
std::vector<FixedComplex> quantize_reference_chips(
    const waveform::ReferenceWaveform& ref, const FixedPointFormat& fmt);

// Run the float correlator and the fixed one on identical inputs (rx
// quantized per fmt, reference as unit chips), rescale the fixed result to
// normalized-correlation units and report the error.  The rx window starts
// at `offset` and is zero-extended like estimate() does.
FixedFloatReport compare_fixed_float(const IqBuffer& rx,
                                     const waveform::ReferenceWaveform& ref,
                                     const FixedPointFormat& fmt,
                                     int acc_bits, long offset = 0,
                                     int window_taps = 64);

}  // namespace chansounder::fixedpoint
