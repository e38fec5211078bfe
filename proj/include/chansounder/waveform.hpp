// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chansounder/types.hpp"

// Synthesis of the 802.11b DSSS training waveform used as the sounding
// reference: scrambled all-ones SYNC bits, DBPSK modulation, 11-chip Barker
// spreading and pulse shaping at an integer number of samples per chip.

namespace chansounder::waveform {

// 11-chip Barker sequence in transmission order.
inline constexpr std::array<int, 11> kBarker = {+1, -1, +1, +1, -1, +1,
                                                +1, +1, -1, -1, -1};
inline constexpr int kChipsPerBit = 11;

struct BitSequence {
  std::vector<std::uint8_t> bits;  // values 0 or 1
};

struct ChipSequence {
  std::vector<std::int8_t> chips;  // values +1 or -1
  int chips_per_bit = kChipsPerBit;
};

enum class PulseShape { kRectangular, kRaisedCosine };

struct WaveformConfig {
  int samples_per_chip = 2;
  double chip_rate_hz = 11.0e6;
  int sync_length_bits = 128;
  // 7-bit scrambler state, bit i (LSB first) = register stage x_{i+1}.
  std::uint8_t scrambler_seed = 0x7f;
  PulseShape pulse_shape = PulseShape::kRectangular;
  double rc_rolloff = 0.35;  // only used for kRaisedCosine
};

// Immutable reference waveform with its energy and full aperiodic
// autocorrelation precomputed (both are needed on every estimate).
class ReferenceWaveform {
 public:
  static ReferenceWaveform from_samples(std::vector<cplx> samples,
                                        double sample_rate_hz,
                                        std::string id = "custom");

  const std::vector<cplx>& samples() const { return samples_; }
  double sample_rate_hz() const { return sample_rate_hz_; }
  double energy() const { return energy_; }
  const std::string& id() const { return id_; }

  // r[lag] for lag in [-(N-1), N-1], zero outside that range; see
  // kernels::autocorrelate for the packed layout.
  const std::vector<cplx>& autocorr() const { return autocorr_; }
  cplx autocorr_at(long lag) const;

 private:
  ReferenceWaveform() = default;
  std::vector<cplx> samples_;
  std::vector<cplx> autocorr_;
  double sample_rate_hz_ = 0.0;
  double energy_ = 0.0;
  std::string id_;
};

// Frame-synchronous additive scrambler x^7 + x^4 + 1: a free-running LFSR
// seeded from `seed` is XORed onto the data, so descramble == scramble.
BitSequence scramble(const BitSequence& in, std::uint8_t seed);
BitSequence descramble(const BitSequence& in, std::uint8_t seed);

// Raw keystream of the scrambler LFSR (exposed for tests and documentation).
BitSequence scrambler_keystream(std::uint8_t seed, std::size_t n);

// DBPSK: a 1 bit flips the carrier phase, a 0 bit keeps it.  The running
// phase starts at 0 and each bit is applied before its own symbol is emitted,
// so phases[i] = pi * (b[0] ^ b[1] ^ ... ^ b[i]).  Returned values are
// exactly 0.0 or pi.
std::vector<double> dbpsk_modulate(const BitSequence& bits);

// Spread each DBPSK symbol with the Barker sequence: chip[11*i + c] =
// sign(cos(phases[i])) * kBarker[c].
ChipSequence barker_spread(const std::vector<double>& phases);

// Full synthesis chain.  Sample rate = samples_per_chip * chip_rate_hz;
// output length = sync_length_bits * 11 * samples_per_chip for either pulse
// shape (raised-cosine uses a centered same-length convolution).
ReferenceWaveform synthesize_reference(const WaveformConfig& cfg);

}  // namespace chansounder::waveform
