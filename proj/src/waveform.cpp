// SPDX-License-Identifier: Apache-2.0
#include "chansounder/waveform.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "chansounder/kernels.hpp"

namespace chansounder::waveform {

namespace {

// One step of the x^7 + x^4 + 1 LFSR.  The new bit x7 ^ x4 is also the
// keystream output and is shifted in at stage x1.
inline std::uint8_t lfsr_step(std::uint8_t& state) {
  const std::uint8_t x7 = (state >> 6) & 1u;
  const std::uint8_t x4 = (state >> 3) & 1u;
  const std::uint8_t fb = x7 ^ x4;
  state = static_cast<std::uint8_t>(((state << 1) | fb) & 0x7fu);
  return fb;
}

void check_seed(std::uint8_t seed) {
  detail::require(seed <= 0x7f, "scrambler seed must fit in 7 bits");
  // All-zero LFSR state never leaves zero, so the keystream would be blank.
  detail::require(seed != 0, "degenerate scrambler seed");
}

void check_bits(const BitSequence& in) {
  for (auto b : in.bits) {
    detail::require(b <= 1, "bit sequence values must be 0 or 1");
  }
}

std::vector<double> raised_cosine_pulse(int samples_per_chip, double rolloff) {
  // Truncated at +/-4 chip periods; odd length, centered peak of 1.
  const int half = 4 * samples_per_chip;
  std::vector<double> p(2 * half + 1);
  for (int n = -half; n <= half; ++n) {
    const double t = static_cast<double>(n) / samples_per_chip;  // in chips
    const double denom = 1.0 - 4.0 * rolloff * rolloff * t * t;
    double v;
    if (std::abs(denom) < 1e-9) {
      // Removable singularity at t = +/- 1/(2*rolloff).
      v = std::numbers::pi / 4.0 *
          std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
      if (n == 0) v = std::numbers::pi / 4.0;
    } else {
      const double sinc = (n == 0)
                              ? 1.0
                              : std::sin(std::numbers::pi * t) /
                                    (std::numbers::pi * t);
      v = sinc * std::cos(std::numbers::pi * rolloff * t) / denom;
    }
    p[static_cast<std::size_t>(n + half)] = v;
  }
  return p;
}

}  // namespace

ReferenceWaveform ReferenceWaveform::from_samples(std::vector<cplx> samples,
                                                  double sample_rate_hz,
                                                  std::string id) {
  detail::require(!samples.empty(), "reference waveform must not be empty");
  detail::require(sample_rate_hz > 0.0,
                  "reference sample rate must be positive");
  ReferenceWaveform ref;
  ref.samples_ = std::move(samples);
  ref.sample_rate_hz_ = sample_rate_hz;
  ref.id_ = std::move(id);
  double e = 0.0;
  for (const auto& s : ref.samples_) e += std::norm(s);
  detail::require(e > 0.0, "reference waveform has zero energy");
  ref.energy_ = e;
  ref.autocorr_ = kernels::autocorrelate(ref.samples_);
  return ref;
}

cplx ReferenceWaveform::autocorr_at(long lag) const {
  const long n = static_cast<long>(samples_.size());
  // The aperiodic autocorrelation is zero beyond the waveform support;
  // callers may probe lags past the end (short references, wide windows).
  if (lag <= -n || lag >= n) return {0.0, 0.0};
  return autocorr_[static_cast<std::size_t>(lag + n - 1)];
}

BitSequence scramble(const BitSequence& in, std::uint8_t seed) {
  check_seed(seed);
  check_bits(in);
  BitSequence out;
  out.bits.reserve(in.bits.size());
  std::uint8_t state = seed;
  for (auto b : in.bits) {
    out.bits.push_back(static_cast<std::uint8_t>(b ^ lfsr_step(state)));
  }
  return out;
}

BitSequence descramble(const BitSequence& in, std::uint8_t seed) {
  // Additive scrambler: XOR with the same keystream is its own inverse.
  return scramble(in, seed);
}

BitSequence scrambler_keystream(std::uint8_t seed, std::size_t n) {
  check_seed(seed);
  BitSequence out;
  out.bits.reserve(n);
  std::uint8_t state = seed;
  for (std::size_t i = 0; i < n; ++i) out.bits.push_back(lfsr_step(state));
  return out;
}

std::vector<double> dbpsk_modulate(const BitSequence& bits) {
  check_bits(bits);
  std::vector<double> phases;
  phases.reserve(bits.bits.size());
  unsigned parity = 0;
  for (auto b : bits.bits) {
    parity ^= b;
    phases.push_back(parity ? std::numbers::pi : 0.0);
  }
  return phases;
}

ChipSequence barker_spread(const std::vector<double>& phases) {
  ChipSequence out;
  out.chips.reserve(phases.size() * kChipsPerBit);
  for (double ph : phases) {
    // Phases are multiples of pi, so cos() rounds exactly to +/-1.
    const auto sign = static_cast<std::int8_t>(std::llround(std::cos(ph)));
    detail::require(sign == 1 || sign == -1,
                    "dbpsk phase must be a multiple of pi");
    for (int c = 0; c < kChipsPerBit; ++c) {
      out.chips.push_back(static_cast<std::int8_t>(sign * kBarker[c]));
    }
  }
  return out;
}

ReferenceWaveform synthesize_reference(const WaveformConfig& cfg) {
  detail::require(cfg.samples_per_chip >= 1,
                  "samples_per_chip must be a positive integer");
  detail::require(cfg.chip_rate_hz > 0.0, "chip_rate_hz must be positive");
  detail::require(cfg.sync_length_bits >= 1,
                  "sync_length_bits must be a positive integer");
  check_seed(cfg.scrambler_seed);
  if (cfg.pulse_shape == PulseShape::kRaisedCosine) {
    detail::require(cfg.rc_rolloff > 0.0 && cfg.rc_rolloff <= 1.0,
                    "rc_rolloff must be in (0, 1]");
  }

  // SYNC field: all-ones bits through the scrambler.
  BitSequence sync;
  sync.bits.assign(static_cast<std::size_t>(cfg.sync_length_bits), 1u);
  const BitSequence scrambled = scramble(sync, cfg.scrambler_seed);
  const std::vector<double> phases = dbpsk_modulate(scrambled);
  const ChipSequence chips = barker_spread(phases);

  const std::size_t spc = static_cast<std::size_t>(cfg.samples_per_chip);
  const std::size_t n_samples = chips.chips.size() * spc;
  std::vector<cplx> samples(n_samples, cplx{0.0, 0.0});
  if (cfg.pulse_shape == PulseShape::kRectangular) {
    for (std::size_t i = 0; i < chips.chips.size(); ++i) {
      for (std::size_t s = 0; s < spc; ++s) {
        samples[i * spc + s] = cplx{static_cast<double>(chips.chips[i]), 0.0};
      }
    }
  } else {
    // Impulse train at chip instants convolved with a raised-cosine pulse;
    // "same" alignment keeps the length equal to the rectangular case.
    const std::vector<double> pulse =
        raised_cosine_pulse(cfg.samples_per_chip, cfg.rc_rolloff);
    const long half = static_cast<long>(pulse.size() / 2);
    for (std::size_t i = 0; i < chips.chips.size(); ++i) {
      const long center = static_cast<long>(i * spc);
      for (long k = 0; k < static_cast<long>(pulse.size()); ++k) {
        const long n = center + k - half;
        if (n < 0 || n >= static_cast<long>(n_samples)) continue;
        samples[static_cast<std::size_t>(n)] +=
            cplx{chips.chips[i] * pulse[static_cast<std::size_t>(k)], 0.0};
      }
    }
  }

  std::ostringstream id;
  id << "dsss11b:sync" << cfg.sync_length_bits << ":seed" << std::hex
     << static_cast<int>(cfg.scrambler_seed) << std::dec << ":spc"
     << cfg.samples_per_chip
     << (cfg.pulse_shape == PulseShape::kRectangular ? ":rect" : ":rc");
  return ReferenceWaveform::from_samples(
      std::move(samples), cfg.samples_per_chip * cfg.chip_rate_hz, id.str());
}

}  // namespace chansounder::waveform
