// SPDX-License-Identifier: Apache-2.0
#include "chansounder/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "chansounder/kernels.hpp"

namespace chansounder::fixedpoint {

namespace {

// Saturating/wrapping add of `term` into `acc` within acc_bits of
// two's-complement range; bumps `events` when the exact sum leaves range.
inline std::int64_t acc_add(std::int64_t acc, std::int64_t term,
                            std::int64_t lo, std::int64_t hi,
                            std::uint64_t mask, Overflow policy,
                            std::uint32_t& events) {
  const __int128 exact = static_cast<__int128>(acc) + term;
  if (exact >= lo && exact <= hi) return static_cast<std::int64_t>(exact);
  ++events;
  if (policy == Overflow::kSaturate) return exact > hi ? hi : lo;
  // Two's-complement wrap into [lo, hi].
  const std::uint64_t wrapped =
      static_cast<std::uint64_t>(exact - lo) & mask;
  return static_cast<std::int64_t>(wrapped) + lo;
}

void check_sequence(std::span<const FixedComplex> seq, const char* name) {
  detail::require(!seq.empty(),
                  std::string("fixed_correlate: empty ") + name);
  const FixedPointFormat fmt = seq[0].format;
  validate_format(fmt);
  const std::int32_t hi = max_raw(fmt);
  const std::int32_t lo = min_raw(fmt);
  for (const auto& q : seq) {
    detail::require(q.format == fmt,
                    std::string("fixed_correlate: mixed formats in ") + name);
    detail::require(q.re_raw >= lo && q.re_raw <= hi && q.im_raw >= lo &&
                        q.im_raw <= hi,
                    std::string("fixed_correlate: raw value out of range in ") +
                        name);
  }
}

}  // namespace

void validate_format(const FixedPointFormat& fmt) {
  detail::require(fmt.total_bits >= 4 && fmt.total_bits <= 32,
                  "fixed-point total_bits must be in [4, 32]");
  detail::require(fmt.frac_bits >= 0 && fmt.frac_bits < fmt.total_bits,
                  "fixed-point frac_bits must be in [0, total_bits-1]");
}

std::int32_t max_raw(const FixedPointFormat& fmt) {
  return static_cast<std::int32_t>((std::int64_t{1} << (fmt.total_bits - 1)) -
                                   1);
}

std::int32_t min_raw(const FixedPointFormat& fmt) {
  return static_cast<std::int32_t>(-(std::int64_t{1}
                                     << (fmt.total_bits - 1)));
}

std::int32_t quantize_value(double v, const FixedPointFormat& fmt) {
  validate_format(fmt);
  detail::require(std::isfinite(v), "cannot quantize a non-finite value");
  const double scaled = std::ldexp(v, fmt.frac_bits);
  const double rounded = (fmt.rounding == Rounding::kRoundHalfEven)
                             ? std::nearbyint(scaled)
                             : std::trunc(scaled);
  const double hi = static_cast<double>(max_raw(fmt));
  const double lo = static_cast<double>(min_raw(fmt));
  if (fmt.overflow == Overflow::kSaturate) {
    if (rounded >= hi) return max_raw(fmt);
    if (rounded <= lo) return min_raw(fmt);
    return static_cast<std::int32_t>(rounded);
  }
  // Wrap: reduce the rounded value modulo 2^total_bits into [lo, hi].
  const double span = std::ldexp(1.0, fmt.total_bits);
  double r = std::fmod(rounded - lo, span);
  if (r < 0.0) r += span;
  return static_cast<std::int32_t>(r + lo);
}

std::vector<FixedComplex> quantize(const IqBuffer& sig,
                                   const FixedPointFormat& fmt) {
  validate_format(fmt);
  std::vector<FixedComplex> out;
  out.reserve(sig.samples.size());
  for (const auto& s : sig.samples) {
    FixedComplex q;
    q.re_raw = quantize_value(s.real(), fmt);
    q.im_raw = quantize_value(s.imag(), fmt);
    q.format = fmt;
    out.push_back(q);
  }
  return out;
}

cplx to_float(const FixedComplex& q) {
  const double scale = std::ldexp(1.0, -q.format.frac_bits);
  return cplx{q.re_raw * scale, q.im_raw * scale};
}

std::vector<FixedAccumulator> fixed_correlate(
    std::span<const FixedComplex> rx_q, std::span<const FixedComplex> ref_q,
    long offset, int window_taps, int acc_bits) {
  check_sequence(rx_q, "rx");
  check_sequence(ref_q, "reference");
  const FixedPointFormat fmt = rx_q[0].format;
  detail::require(ref_q[0].format.total_bits == fmt.total_bits,
                  "fixed_correlate: rx and reference total_bits differ");
  detail::require(acc_bits >= 2 * fmt.total_bits && acc_bits <= 64,
                  "fixed_correlate: acc_bits must be in [2*total_bits, 64]");
  detail::require(window_taps >= 1, "fixed_correlate: window_taps < 1");
  detail::require(offset >= 0, "fixed_correlate: negative offset");
  const long needed =
      offset + static_cast<long>(ref_q.size()) + window_taps - 1;
  if (needed > static_cast<long>(rx_q.size())) {
    std::ostringstream msg;
    msg << "fixed_correlate window exceeds buffer: need " << needed
        << " samples, have " << rx_q.size();
    throw Error(msg.str());
  }

  // Accumulator range; the [2*total_bits, 64] precondition guarantees every
  // single product is representable, so only the running sum can overflow.
  const std::int64_t hi =
      (acc_bits == 64)
          ? std::numeric_limits<std::int64_t>::max()
          : (std::int64_t{1} << (acc_bits - 1)) - 1;
  const std::int64_t lo =
      (acc_bits == 64) ? std::numeric_limits<std::int64_t>::min() : -hi - 1;
  const std::uint64_t mask = (acc_bits == 64)
                                 ? ~std::uint64_t{0}
                                 : (std::uint64_t{1} << acc_bits) - 1;
  const Overflow policy = fmt.overflow;

  std::vector<FixedAccumulator> out(static_cast<std::size_t>(window_taps));
  for (long k = 0; k < window_taps; ++k) {
    FixedAccumulator acc;
    for (std::size_t n = 0; n < ref_q.size(); ++n) {
      const FixedComplex& x =
          rx_q[static_cast<std::size_t>(offset + k) + n];
      const FixedComplex& r = ref_q[n];
      const std::int64_t a = x.re_raw;
      const std::int64_t b = x.im_raw;
      const std::int64_t c = r.re_raw;
      const std::int64_t d = r.im_raw;
      // x * conj(r) accumulated product-by-product in a fixed order.
      acc.re = acc_add(acc.re, a * c, lo, hi, mask, policy,
                       acc.overflow_events);
      acc.re = acc_add(acc.re, b * d, lo, hi, mask, policy,
                       acc.overflow_events);
      acc.im = acc_add(acc.im, b * c, lo, hi, mask, policy,
                       acc.overflow_events);
      acc.im = acc_add(acc.im, -(a * d), lo, hi, mask, policy,
                       acc.overflow_events);
    }
    out[static_cast<std::size_t>(k)] = acc;
  }
  return out;
}

std::vector<FixedComplex> quantize_reference_chips(
    const waveform::ReferenceWaveform& ref, const FixedPointFormat& fmt) {
  validate_format(fmt);
  std::vector<FixedComplex> out;
  out.reserve(ref.samples().size());
  for (const auto& s : ref.samples()) {
    detail::require(std::abs(std::abs(s.real()) - 1.0) < 1e-9 &&
                        std::abs(s.imag()) < 1e-9,
                    "fixed-point path requires a rectangular-pulse "
                    "reference with +/-1 chips");
    FixedComplex q;
    q.re_raw = s.real() > 0.0 ? 1 : -1;
    q.im_raw = 0;
    q.format = fmt;
    out.push_back(q);
  }
  return out;
}

FixedFloatReport compare_fixed_float(const IqBuffer& rx,
                                     const waveform::ReferenceWaveform& ref,
                                     const FixedPointFormat& fmt,
                                     int acc_bits, long offset,
                                     int window_taps) {
  validate_format(fmt);
  detail::require(window_taps >= 1, "compare_fixed_float: window_taps < 1");
  detail::require(offset >= 0 &&
                      offset < static_cast<long>(rx.samples.size()),
                  "compare_fixed_float: offset outside the capture");
  const long n_ref = static_cast<long>(ref.samples().size());
  const long win = n_ref + window_taps - 1;

  // Zero-extended float window starting at `offset` (same convention as
  // estimate()), quantized once for the fixed path.
  std::vector<cplx> window(static_cast<std::size_t>(win), cplx{0.0, 0.0});
  for (long u = 0; u < win; ++u) {
    const long n = offset + u;
    if (n >= static_cast<long>(rx.samples.size())) break;
    window[static_cast<std::size_t>(u)] =
        rx.samples[static_cast<std::size_t>(n)];
  }

  std::vector<cplx> c_float(static_cast<std::size_t>(window_taps));
  kernels::lag_correlate(window, ref.samples(), 0, c_float);
  for (auto& v : c_float) v /= ref.energy();

  IqBuffer win_buf;
  win_buf.sample_rate_hz = rx.sample_rate_hz;
  win_buf.samples = window;
  const std::vector<FixedComplex> rx_q = quantize(win_buf, fmt);
  const std::vector<FixedComplex> ref_q = quantize_reference_chips(ref, fmt);
  const std::vector<FixedAccumulator> acc =
      fixed_correlate(rx_q, ref_q, 0, window_taps, acc_bits);

  // Rescale raw accumulators to normalized-correlation units: unit chip
  // codes make the accumulator sum rx_raw * (+/-1), i.e. 2^frac times the
  // un-normalized correlation.
  const double scale = std::ldexp(1.0, -fmt.frac_bits) / ref.energy();
  FixedFloatReport rep;
  double sig_pow = 0.0;
  double err_pow = 0.0;
  for (int k = 0; k < window_taps; ++k) {
    const auto& a = acc[static_cast<std::size_t>(k)];
    const cplx c_fix{a.re * scale, a.im * scale};
    const cplx err = c_fix - c_float[static_cast<std::size_t>(k)];
    rep.max_abs_err = std::max(rep.max_abs_err, std::abs(err));
    sig_pow += std::norm(c_float[static_cast<std::size_t>(k)]);
    err_pow += std::norm(err);
    rep.overflow_events += a.overflow_events;
  }
  rep.sqnr_db = (err_pow == 0.0)
                    ? std::numeric_limits<double>::infinity()
                    : 10.0 * std::log10(sig_pow / err_pow);
  return rep;
}

}  // namespace chansounder::fixedpoint
