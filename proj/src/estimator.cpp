// SPDX-License-Identifier: Apache-2.0
#include "chansounder/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "chansounder/kernels.hpp"
#include "chansounder/linalg.hpp"

namespace chansounder::estimator {

namespace {

void check_rx(const IqBuffer& rx) {
  detail::require(!rx.samples.empty(), "capture buffer is empty");
  detail::require(rx.sample_rate_hz > 0.0,
                  "capture buffer needs a positive sample rate");
}

void check_rates(const IqBuffer& rx, const ReferenceWaveform& ref) {
  const double rel = std::abs(rx.sample_rate_hz - ref.sample_rate_hz()) /
                     ref.sample_rate_hz();
  detail::require(rel <= 1e-9, "capture and reference sample rates differ");
}

// Wrap an angle difference into (-pi, pi].
double wrap_pi(double d) {
  const double two_pi = 2.0 * std::numbers::pi;
  d = std::fmod(d + std::numbers::pi, two_pi);
  if (d <= 0.0) d += two_pi;
  return d - std::numbers::pi;
}

}  // namespace

std::vector<Detection> detect_packet(const IqBuffer& rx,
                                     const ReferenceWaveform& ref,
                                     double threshold) {
  check_rx(rx);
  check_rates(rx, ref);
  detail::require(threshold > 0.0 && threshold < 1.0,
                  "detect threshold must be in (0, 1)");
  const std::size_t n_ref = ref.samples().size();
  detail::require(rx.samples.size() >= n_ref,
                  "buffer shorter than reference");

  const std::size_t n_off = rx.samples.size() - n_ref + 1;
  std::vector<cplx> corr(n_off);
  std::vector<double> energy(n_off);
  kernels::sliding_correlate(rx.samples, ref.samples(), corr);
  kernels::sliding_energy(rx.samples, n_ref, energy);

  std::vector<double> metric(n_off);
  for (std::size_t o = 0; o < n_off; ++o) {
    const double denom = ref.energy() * energy[o];
    // Cauchy-Schwarz bounds the true value by 1; clamp rounding dust.
    metric[o] =
        denom > 0.0 ? std::min(std::norm(corr[o]) / denom, 1.0) : 0.0;
  }

  // Keep threshold crossings that are the maximum in a +/- n_ref/2 window;
  // an exact tie goes to the earliest offset.
  const long w = static_cast<long>(n_ref / 2);
  std::vector<Detection> out;
  for (long o = 0; o < static_cast<long>(n_off); ++o) {
    if (metric[static_cast<std::size_t>(o)] < threshold) continue;
    const double m = metric[static_cast<std::size_t>(o)];
    bool is_peak = true;
    const long lo = std::max(0L, o - w);
    const long hi = std::min(static_cast<long>(n_off) - 1, o + w);
    for (long p = lo; p <= hi && is_peak; ++p) {
      const double mp = metric[static_cast<std::size_t>(p)];
      if (mp > m || (mp == m && p < o)) is_peak = false;
    }
    if (is_peak) out.push_back(Detection{o, m});
  }
  return out;
}

double estimate_cfo(const IqBuffer& rx, const ReferenceWaveform& ref,
                    long offset) {
  check_rx(rx);
  check_rates(rx, ref);
  const long n_ref = static_cast<long>(ref.samples().size());
  detail::require(offset >= 0 &&
                      offset + n_ref <= static_cast<long>(rx.samples.size()),
                  "cfo estimate: reference window does not fit the capture");
  const long seg = n_ref / kCfoSegments;
  detail::require(seg >= 1, "cfo estimate: reference too short to segment");

  // Per-segment correlation phases, unwrapped through successive
  // differences.
  std::vector<double> psi(kCfoSegments);
  double prev_raw = 0.0;
  for (int s = 0; s < kCfoSegments; ++s) {
    cplx z{0.0, 0.0};
    double seg_energy = 0.0;
    for (long n = 0; n < seg; ++n) {
      const long i = static_cast<long>(s) * seg + n;
      z += rx.samples[static_cast<std::size_t>(offset + i)] *
           std::conj(ref.samples()[static_cast<std::size_t>(i)]);
      seg_energy += std::norm(ref.samples()[static_cast<std::size_t>(i)]);
    }
    detail::require(
        std::abs(z) >=
            10.0 * std::numeric_limits<double>::epsilon() * seg_energy,
        "insufficient signal for CFO estimate");
    const double raw = std::arg(z);
    psi[static_cast<std::size_t>(s)] =
        (s == 0) ? raw
                 : psi[static_cast<std::size_t>(s - 1)] +
                       wrap_pi(raw - prev_raw);
    prev_raw = raw;
  }

  // Least-squares slope of psi against the segment index; segment centers
  // are uniformly spaced so the index fit gives the same slope.
  const double mean_x = (kCfoSegments - 1) / 2.0;
  double mean_y = 0.0;
  for (double p : psi) mean_y += p;
  mean_y /= kCfoSegments;
  double num = 0.0;
  double den = 0.0;
  for (int s = 0; s < kCfoSegments; ++s) {
    const double dx = static_cast<double>(s) - mean_x;
    num += dx * (psi[static_cast<std::size_t>(s)] - mean_y);
    den += dx * dx;
  }
  const double slope = num / den;  // radians per segment
  const double seg_duration = static_cast<double>(seg) / rx.sample_rate_hz;
  return slope / (2.0 * std::numbers::pi * seg_duration);
}

RawCorrelation correlate(const IqBuffer& rx, const ReferenceWaveform& ref,
                         long offset, int window_taps) {
  check_rx(rx);
  check_rates(rx, ref);
  detail::require(window_taps >= 1, "correlate: window_taps must be >= 1");
  detail::require(offset >= 0, "correlate: offset must be non-negative");
  const long needed =
      offset + static_cast<long>(ref.samples().size()) + window_taps - 1;
  if (needed > static_cast<long>(rx.samples.size())) {
    std::ostringstream msg;
    msg << "correlate window exceeds buffer: need " << needed
        << " samples, have " << rx.samples.size();
    throw Error(msg.str());
  }

  RawCorrelation out;
  out.values.resize(static_cast<std::size_t>(window_taps));
  kernels::lag_correlate(rx.samples, ref.samples(), offset, out.values);
  for (auto& v : out.values) v /= ref.energy();
  out.lag_spacing_s = 1.0 / rx.sample_rate_hz;
  out.reference_id = ref.id();
  return out;
}

DeconvResult deconvolve(const RawCorrelation& corr,
                        const ReferenceWaveform& ref, double lambda) {
  const int L = static_cast<int>(corr.values.size());
  detail::require(L >= 1, "deconvolve: empty correlation");
  detail::require(lambda >= 0.0, "deconvolve: lambda must be >= 0");
  detail::require(static_cast<std::size_t>(L) <= ref.samples().size(),
                  "deconvolve: more lags than reference samples");

  // A[i][j] = normalized reference autocorrelation at lag i - j (unit peak).
  linalg::HermMatrix a_full(L);  // Toeplitz, not Hermitian; storage reused
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      a_full.at(i, j) = ref.autocorr_at(i - j) / ref.energy();
    }
  }

  // Normal equations M h = b with M = A^H A + lambda I, b = A^H c.
  linalg::HermMatrix m(L);
  for (int i = 0; i < L; ++i) {
    for (int j = i; j < L; ++j) {
      cplx s{0.0, 0.0};
      for (int k = 0; k < L; ++k) {
        s += std::conj(a_full.at(k, i)) * a_full.at(k, j);
      }
      if (i == j) s += lambda;
      m.at(i, j) = s;
      m.at(j, i) = std::conj(s);
    }
  }
  std::vector<cplx> b(static_cast<std::size_t>(L), cplx{0.0, 0.0});
  for (int i = 0; i < L; ++i) {
    cplx s{0.0, 0.0};
    for (int k = 0; k < L; ++k) {
      s += std::conj(a_full.at(k, i)) *
           corr.values[static_cast<std::size_t>(k)];
    }
    b[static_cast<std::size_t>(i)] = s;
  }

  linalg::HermMatrix lower(L);
  const bool ok = linalg::cholesky_factor(m, lower);
  if (lambda == 0.0) {
    const double cond =
        ok ? linalg::condition_estimate(m, lower)
           : std::numeric_limits<double>::infinity();
    if (cond > kMaxCondition) {
      throw Error("ill-conditioned deconvolution; increase lambda");
    }
  }
  detail::require(ok, "deconvolve: Cholesky factorization failed");
  std::vector<cplx> h = linalg::cholesky_solve(lower, b);

  // Residual of the original (unregularized) system.
  double res = 0.0;
  for (int i = 0; i < L; ++i) {
    cplx r = corr.values[static_cast<std::size_t>(i)];
    for (int j = 0; j < L; ++j) {
      r -= a_full.at(i, j) * h[static_cast<std::size_t>(j)];
    }
    res += std::norm(r);
  }

  DeconvResult out;
  out.cir.taps = std::move(h);
  out.cir.tap_spacing_s = corr.lag_spacing_s;
  out.cir.start_offset_s = 0.0;
  out.residual_norm = std::sqrt(res);
  return out;
}

double estimate_noise_floor(const Cir& cir, int exclude_window) {
  detail::require(!cir.taps.empty(), "noise floor: empty cir");
  detail::require(exclude_window >= 0,
                  "noise floor: exclude window must be >= 0");
  const long n = static_cast<long>(cir.taps.size());
  detail::require(n > 2L * exclude_window + 1,
                  "noise floor: too few taps for the exclusion window");
  long strongest = 0;
  double best = -1.0;
  for (long k = 0; k < n; ++k) {
    const double p = std::norm(cir.taps[static_cast<std::size_t>(k)]);
    if (p > best) {
      best = p;
      strongest = k;
    }
  }
  std::vector<double> powers;
  powers.reserve(cir.taps.size());
  for (long k = 0; k < n; ++k) {
    if (std::abs(k - strongest) <= exclude_window) continue;
    powers.push_back(std::norm(cir.taps[static_cast<std::size_t>(k)]));
  }
  std::sort(powers.begin(), powers.end());
  const std::size_t half = powers.size() / 2;
  const double median = (powers.size() % 2 == 1)
                            ? powers[half]
                            : 0.5 * (powers[half - 1] + powers[half]);
  // Median -> mean conversion for exponentially distributed noise power.
  return median / std::log(2.0);
}

Cir threshold_taps(const Cir& cir, double noise_floor_power,
                   double margin_db) {
  detail::require(noise_floor_power >= 0.0,
                  "threshold_taps: negative noise floor");
  Cir out = cir;
  const double cut = noise_floor_power * std::pow(10.0, margin_db / 10.0);
  for (auto& t : out.taps) {
    if (std::norm(t) < cut) t = cplx{0.0, 0.0};
  }
  return out;
}

std::vector<CirEstimate> estimate(const IqBuffer& rx,
                                  const ReferenceWaveform& ref,
                                  const EstimatorConfig& cfg) {
  detail::require(cfg.window_taps >= 1, "estimator config: window_taps < 1");
  detail::require(cfg.lambda >= 0.0, "estimator config: lambda < 0");

  const std::vector<Detection> dets =
      detect_packet(rx, ref, cfg.detect_threshold);
  std::vector<CirEstimate> out;
  out.reserve(dets.size());

  const long n_ref = static_cast<long>(ref.samples().size());
  for (const Detection& det : dets) {
    const double cfo =
        cfg.cfo_correction ? estimate_cfo(rx, ref, det.offset_samples) : 0.0;

    // Copy the window the correlator needs, derotating by the CFO estimate.
    // The absolute sample index in the phase keeps tap phases aligned with
    // the transmit frame; a capture that ends inside the lag window is
    // zero-extended.
    const long win = n_ref + cfg.window_taps - 1;
    IqBuffer corrected;
    corrected.sample_rate_hz = rx.sample_rate_hz;
    corrected.samples.assign(static_cast<std::size_t>(win), cplx{0.0, 0.0});
    const double cps = cfo / rx.sample_rate_hz;  // cycles per sample
    for (long u = 0; u < win; ++u) {
      const long nabs = det.offset_samples + u;
      if (nabs >= static_cast<long>(rx.samples.size())) break;
      const double frac = std::fmod(cps * static_cast<double>(nabs), 1.0);
      const double ph = -2.0 * std::numbers::pi * frac;
      corrected.samples[static_cast<std::size_t>(u)] =
          rx.samples[static_cast<std::size_t>(nabs)] *
          cplx{std::cos(ph), std::sin(ph)};
    }

    RawCorrelation raw = correlate(corrected, ref, 0, cfg.window_taps);
    DeconvResult dres = deconvolve(raw, ref, cfg.lambda);
    const double floor = estimate_noise_floor(dres.cir);
    Cir cir = threshold_taps(dres.cir, floor, cfg.tap_margin_db);
    cir.start_offset_s =
        static_cast<double>(det.offset_samples) / rx.sample_rate_hz;

    CirEstimate est;
    est.cir = std::move(cir);
    est.noise_floor_power = floor;
    est.timing_offset_samples = det.offset_samples;
    est.cfo_hz_est = cfo;
    est.residual_norm = dres.residual_norm;
    out.push_back(std::move(est));
  }
  return out;
}

}  // namespace chansounder::estimator
