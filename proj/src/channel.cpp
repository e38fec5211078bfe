// SPDX-License-Identifier: Apache-2.0
#include "chansounder/channel.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "chansounder/rng.hpp"

namespace chansounder::channel {

namespace {

constexpr double kGridTolSamples = 1e-6;  // integer-mode alignment tolerance
constexpr int kSincHalfWidth = 8;         // windowed-sinc support in samples

void check_input(const IqBuffer& in) {
  detail::require(!in.samples.empty(), "channel input buffer is empty");
  detail::require(in.sample_rate_hz > 0.0,
                  "channel input needs a positive sample rate");
}

void check_cir(const Cir& cir) {
  detail::require(!cir.taps.empty(), "cir has no taps");
  detail::require(cir.taps.size() == 1 || cir.tap_spacing_s > 0.0,
                  "cir tap spacing must be positive");
  detail::require(cir.start_offset_s >= 0.0,
                  "cir start offset must be non-negative");
}

double tap_delay_samples(const Cir& cir, std::size_t k, double fs) {
  return (cir.start_offset_s + static_cast<double>(k) * cir.tap_spacing_s) *
         fs;
}

// Hann-windowed sinc interpolation kernel evaluated at t samples from the
// peak; zero outside +/- kSincHalfWidth.
double windowed_sinc(double t) {
  if (std::abs(t) >= kSincHalfWidth) return 0.0;
  const double w =
      0.5 * (1.0 + std::cos(std::numbers::pi * t / kSincHalfWidth));
  if (std::abs(t) < 1e-12) return w;
  return w * std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
}

double mean_power(const std::vector<cplx>& v) {
  double p = 0.0;
  for (const auto& s : v) p += std::norm(s);
  return p / static_cast<double>(v.size());
}

}  // namespace

IqBuffer apply_cir(const IqBuffer& in, const Cir& cir, TapInterp interp) {
  check_input(in);
  check_cir(cir);
  const double fs = in.sample_rate_hz;
  const std::size_t n_in = in.samples.size();

  const double max_delay = tap_delay_samples(cir, cir.taps.size() - 1, fs);
  std::size_t n_out = n_in + static_cast<std::size_t>(std::ceil(max_delay));
  if (interp == TapInterp::kWindowedSinc) n_out += kSincHalfWidth;

  IqBuffer out;
  out.sample_rate_hz = fs;
  out.samples.assign(n_out, cplx{0.0, 0.0});

  for (std::size_t k = 0; k < cir.taps.size(); ++k) {
    if (cir.taps[k] == cplx{0.0, 0.0}) continue;
    const double d = tap_delay_samples(cir, k, fs);
    const double d_round = std::round(d);
    if (interp == TapInterp::kInteger ||
        std::abs(d - d_round) <= kGridTolSamples) {
      detail::require(std::abs(d - d_round) <= kGridTolSamples,
                      "fractional tap spacing requires interpolation mode");
      const auto di = static_cast<std::size_t>(d_round);
      for (std::size_t n = 0; n < n_in; ++n) {
        out.samples[n + di] += cir.taps[k] * in.samples[n];
      }
    } else {
      // Fractional delay: convolve with a shifted windowed sinc.
      const long base = static_cast<long>(std::floor(d));
      const double frac = d - static_cast<double>(base);
      for (long j = -kSincHalfWidth + 1; j <= kSincHalfWidth; ++j) {
        const double c = windowed_sinc(static_cast<double>(j) - frac);
        if (c == 0.0) continue;
        const cplx g = cir.taps[k] * c;
        for (std::size_t n = 0; n < n_in; ++n) {
          const long m = static_cast<long>(n) + base + j;
          if (m < 0 || m >= static_cast<long>(n_out)) continue;
          out.samples[static_cast<std::size_t>(m)] += g * in.samples[n];
        }
      }
    }
  }
  return out;
}

IqBuffer apply_cfo(const IqBuffer& in, double cfo_hz) {
  check_input(in);
  IqBuffer out;
  out.sample_rate_hz = in.sample_rate_hz;
  out.samples.resize(in.samples.size());
  const double cycles_per_sample = cfo_hz / in.sample_rate_hz;
  for (std::size_t n = 0; n < in.samples.size(); ++n) {
    // Reduce to fractional cycles before expanding to radians so that an
    // integer number of cycles per sample is an exact no-op.
    const double frac =
        std::fmod(cycles_per_sample * static_cast<double>(n), 1.0);
    const double ph = 2.0 * std::numbers::pi * frac;
    out.samples[n] = in.samples[n] * cplx{std::cos(ph), std::sin(ph)};
  }
  return out;
}

IqBuffer add_awgn(const IqBuffer& in, double snr_db, std::uint64_t seed) {
  check_input(in);
  if (std::isinf(snr_db) && snr_db > 0.0) return in;
  detail::require(std::isfinite(snr_db), "snr_db must be finite or +inf");
  const double p_sig = mean_power(in.samples);
  detail::require(p_sig > 0.0,
                  "cannot calibrate SNR against zero-power signal");
  const double variance = p_sig / std::pow(10.0, snr_db / 10.0);
  const double comp_std = std::sqrt(variance / 2.0);

  IqBuffer out;
  out.sample_rate_hz = in.sample_rate_hz;
  out.samples = in.samples;
  rng::SplitMix64 gen(seed);
  for (auto& s : out.samples) {
    const auto [z0, z1] = rng::gaussian_pair(gen);
    s += cplx{comp_std * z0, comp_std * z1};
  }
  return out;
}

IqBuffer simulate(const IqBuffer& tx, const ChannelConfig& cfg) {
  check_input(tx);
  detail::require(cfg.timing_offset_samples >= 0,
                  "timing offset must be non-negative");

  IqBuffer padded;
  padded.sample_rate_hz = tx.sample_rate_hz;
  padded.samples.assign(static_cast<std::size_t>(cfg.timing_offset_samples),
                        cplx{0.0, 0.0});
  padded.samples.insert(padded.samples.end(), tx.samples.begin(),
                        tx.samples.end());

  const IqBuffer faded = apply_cir(padded, cfg.cir, cfg.interp);
  const IqBuffer rotated = apply_cfo(faded, cfg.cfo_hz);
  return add_awgn(rotated, cfg.snr_db, cfg.noise_seed);
}

}  // namespace chansounder::channel
