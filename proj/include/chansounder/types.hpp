// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace chansounder {

using cplx = std::complex<double>;

// All recoverable failures in the library surface as this exception type so
// that callers (and the CLI) can distinguish domain errors from programming
// bugs.  The message always names the offending argument or file.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A contiguous block of complex baseband samples with its sample rate.
// Sample index n corresponds to time n / sample_rate_hz.
struct IqBuffer {
  std::vector<cplx> samples;
  double sample_rate_hz = 0.0;

  std::size_t size() const { return samples.size(); }
};

// Channel impulse response on a uniform delay grid.  taps[k] is the complex
// gain at delay start_offset_s + k * tap_spacing_s.  A CIR used as simulation
// input typically has start_offset_s == 0; an estimated CIR carries the
// absolute delay of its first tap so results from different packets share a
// common time axis.
struct Cir {
  std::vector<cplx> taps;
  double tap_spacing_s = 0.0;
  double start_offset_s = 0.0;
};

namespace detail {

// Small helper used throughout for precondition checks.
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace detail

}  // namespace chansounder
