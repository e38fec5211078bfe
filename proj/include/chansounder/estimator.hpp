// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "chansounder/types.hpp"
#include "chansounder/waveform.hpp"

// CIR estimation from captures containing the DSSS training waveform:
// matched-filter detection, carrier-frequency-offset estimation and
// correction, lag-domain correlation and Tikhonov-regularized deconvolution
// of the reference autocorrelation.

namespace chansounder::estimator {

using waveform::ReferenceWaveform;

struct Detection {
  long offset_samples = 0;      // first sample of the reference in rx
  double normalized_corr = 0.0; // |xcorr|^2 / (E_ref * E_local), in [0, ~1]
};

// Normalized cross-correlation as a function of lag relative to a detection:
// values[k] = sum_n rx[offset + k + n] * conj(ref[n]) / E_ref.
struct RawCorrelation {
  std::vector<cplx> values;
  double lag_spacing_s = 0.0;
  std::string reference_id;
};

struct DeconvResult {
  Cir cir;               // tap_spacing = lag spacing, start_offset_s = 0
  double residual_norm;  // ||A h - c||_2 of the unregularized residual
};

struct CirEstimate {
  Cir cir;  // start_offset_s carries the absolute delay of lag 0
  double noise_floor_power = 0.0;
  long timing_offset_samples = 0;
  double cfo_hz_est = 0.0;
  double residual_norm = 0.0;
};

struct EstimatorConfig {
  int window_taps = 64;          // L, number of estimated lags
  double lambda = 1e-3;          // Tikhonov weight, relative to the unit
                                 // normalized autocorrelation peak
  double detect_threshold = 0.5; // on normalized correlation
  double tap_margin_db = 6.0;    // significance margin above noise floor
  bool cfo_correction = true;
};

// Taps this close to the strongest tap are excluded from the noise-floor
// median so channel energy does not bias it.
inline constexpr int kNoiseFloorExcludeWindow = 8;
// Number of reference segments used by the phase-slope CFO estimator.
inline constexpr int kCfoSegments = 8;
// Condition-estimate limit above which an unregularized solve is refused.
inline constexpr double kMaxCondition = 1e12;

// All offsets where the normalized correlation metric reaches `threshold`
// (in (0,1)) and is the local maximum within +/- ref.size()/2 (earliest
// offset wins a tie).  Sorted by offset; empty when nothing crosses the
// threshold; a capture shorter than the reference is an error.
std::vector<Detection> detect_packet(const IqBuffer& rx,
                                     const ReferenceWaveform& ref,
                                     double threshold);

// Phase-slope CFO estimate over kCfoSegments equal reference segments with
// successive-difference unwrapping.  Unambiguous up to
// +/- kCfoSegments / (2 * T_ref) (about +/-31 kHz for the default
// waveform).  `offset` is the detected packet start.
double estimate_cfo(const IqBuffer& rx, const ReferenceWaveform& ref,
                    long offset);

// Normalized cross-correlation at lags 0 .. window_taps-1 relative to
// `offset`.  The whole window must fit inside rx (error otherwise);
// estimate() feeds it a zero-extended copy when a capture ends early.
RawCorrelation correlate(const IqBuffer& rx, const ReferenceWaveform& ref,
                         long offset, int window_taps);

// Solve min ||A h - c||^2 + lambda ||h||^2 where A is the Toeplitz matrix of
// the normalized reference autocorrelation.  With lambda == 0 the solve is
// refused (Error) when the normal-equation condition estimate exceeds
// kMaxCondition.
DeconvResult deconvolve(const RawCorrelation& corr,
                        const ReferenceWaveform& ref, double lambda);

// Median of |tap|^2 over all taps at least `exclude_window` away from the
// strongest tap, scaled by 1/ln(2) (median -> mean for the exponential
// power distribution of complex Gaussian noise taps).
double estimate_noise_floor(const Cir& cir,
                            int exclude_window = kNoiseFloorExcludeWindow);

// Zero every tap whose power is below noise_floor_power * 10^(margin_db/10).
// The delay grid is kept intact.
Cir threshold_taps(const Cir& cir, double noise_floor_power,
                   double margin_db);

// Full pipeline: detect -> (optional) CFO estimate + derotation ->
// correlate -> deconvolve -> noise floor -> threshold.  One estimate per
// detection, in offset order.
std::vector<CirEstimate> estimate(const IqBuffer& rx,
                                  const ReferenceWaveform& ref,
                                  const EstimatorConfig& cfg);

}  // namespace chansounder::estimator
