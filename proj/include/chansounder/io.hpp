// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "chansounder/types.hpp"

// IQ capture files (interleaved I,Q little-endian, ci16 or cf32) with JSON
// metadata sidecars, plus the JSON-Lines dataset manifest grouping captures
// into measurement areas.  Byte-level layout is documented in
// docs/formats.md.

namespace chansounder::io {

enum class SampleFormat { kCi16, kCf32 };

std::string to_string(SampleFormat fmt);
SampleFormat sample_format_from_string(const std::string& s);

struct IqFileMeta {
  double sample_rate_hz = 0.0;
  double center_freq_hz = 0.0;
  SampleFormat sample_format = SampleFormat::kCf32;
  double scale = 32767.0;  // full-scale amplitude for ci16
  std::string description;
};

struct ManifestEntry {
  std::string area_id;
  std::string iq_path;
  std::string meta_path;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
};

// Write samples to `path` and the metadata sidecar to `<path>.meta`.
// ci16 components are round(value * scale) saturated to [-32768, 32767];
// cf32 components are IEEE-754 binary32 (doubles rounded once on write).
void write_iq(const std::filesystem::path& path, const IqBuffer& buf,
              const IqFileMeta& meta);

// Inverse of write_iq up to ci16 quantization.  The sidecar is read from
// `meta_path` when given, `<path>.meta` otherwise; missing sidecar,
// truncated payload and unknown sample formats raise Error.
std::pair<IqBuffer, IqFileMeta> read_iq(const std::filesystem::path& path);
std::pair<IqBuffer, IqFileMeta> read_iq(
    const std::filesystem::path& path,
    const std::filesystem::path& meta_path);

// Parse a JSON-Lines manifest: one {"area_id", "iq_path", "meta_path"}
// object per non-blank line.  Paths are kept verbatim (consumers resolve
// them relative to the manifest's directory); duplicate (area_id, iq_path)
// pairs are rejected.
Manifest load_manifest(const std::filesystem::path& path);

}  // namespace chansounder::io
