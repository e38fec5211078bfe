// SPDX-License-Identifier: Apache-2.0
#include "chansounder/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace chansounder::io {

namespace {

using nlohmann::json;

// Explicit little-endian byte packing keeps the on-disk format independent
// of the host.
void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::int16_t quantize_i16(double v, double scale) {
  const double scaled = std::round(v * scale);
  if (scaled >= 32767.0) return 32767;
  if (scaled <= -32768.0) return -32768;
  return static_cast<std::int16_t>(scaled);
}

void check_meta(const IqFileMeta& meta) {
  detail::require(meta.sample_rate_hz > 0.0,
                  "iq metadata: sample_rate_hz must be positive");
  detail::require(meta.scale > 0.0, "iq metadata: scale must be positive");
}

std::filesystem::path default_meta_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".meta");
}

IqFileMeta read_sidecar(const std::filesystem::path& meta_path) {
  std::ifstream in(meta_path);
  if (!in) {
    throw Error("missing IQ metadata sidecar: expected " +
                meta_path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("malformed IQ metadata sidecar " + meta_path.string() +
                ": " + e.what());
  }
  IqFileMeta meta;
  try {
    meta.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    meta.center_freq_hz = j.value("center_freq_hz", 0.0);
    meta.sample_format =
        sample_format_from_string(j.at("sample_format").get<std::string>());
    meta.scale = j.value("scale", 32767.0);
    meta.description = j.value("description", std::string{});
  } catch (const json::exception& e) {
    throw Error("malformed IQ metadata sidecar " + meta_path.string() +
                ": " + e.what());
  }
  check_meta(meta);
  return meta;
}

}  // namespace

std::string to_string(SampleFormat fmt) {
  return fmt == SampleFormat::kCi16 ? "ci16" : "cf32";
}

SampleFormat sample_format_from_string(const std::string& s) {
  if (s == "ci16") return SampleFormat::kCi16;
  if (s == "cf32") return SampleFormat::kCf32;
  throw Error("unknown sample_format '" + s + "' (expected ci16 or cf32)");
}

void write_iq(const std::filesystem::path& path, const IqBuffer& buf,
              const IqFileMeta& meta) {
  check_meta(meta);
  detail::require(buf.sample_rate_hz > 0.0,
                  "iq buffer needs a positive sample rate");
  const double rel =
      std::abs(meta.sample_rate_hz - buf.sample_rate_hz) / buf.sample_rate_hz;
  detail::require(rel <= 1e-9,
                  "iq metadata sample rate disagrees with the buffer");

  std::string payload;
  if (meta.sample_format == SampleFormat::kCi16) {
    payload.reserve(buf.samples.size() * 4);
    for (const auto& s : buf.samples) {
      put_u16(payload, static_cast<std::uint16_t>(
                           quantize_i16(s.real(), meta.scale)));
      put_u16(payload, static_cast<std::uint16_t>(
                           quantize_i16(s.imag(), meta.scale)));
    }
  } else {
    payload.reserve(buf.samples.size() * 8);
    for (const auto& s : buf.samples) {
      put_u32(payload,
              std::bit_cast<std::uint32_t>(static_cast<float>(s.real())));
      put_u32(payload,
              std::bit_cast<std::uint32_t>(static_cast<float>(s.imag())));
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write IQ file: " + path.string());
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error("short write to IQ file: " + path.string());
  out.close();

  json j;
  j["sample_rate_hz"] = meta.sample_rate_hz;
  j["center_freq_hz"] = meta.center_freq_hz;
  j["sample_format"] = to_string(meta.sample_format);
  j["scale"] = meta.scale;
  j["description"] = meta.description;
  const std::filesystem::path meta_path = default_meta_path(path);
  std::ofstream mout(meta_path);
  if (!mout) throw Error("cannot write IQ sidecar: " + meta_path.string());
  mout << j.dump(2) << "\n";
  if (!mout) throw Error("short write to IQ sidecar: " + meta_path.string());
}

std::pair<IqBuffer, IqFileMeta> read_iq(const std::filesystem::path& path) {
  return read_iq(path, default_meta_path(path));
}

std::pair<IqBuffer, IqFileMeta> read_iq(
    const std::filesystem::path& path,
    const std::filesystem::path& meta_path) {
  const IqFileMeta meta = read_sidecar(meta_path);

  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open IQ file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string payload = ss.str();

  const std::size_t frame =
      meta.sample_format == SampleFormat::kCi16 ? 4 : 8;
  if (payload.size() % frame != 0) {
    std::ostringstream msg;
    msg << "malformed IQ payload: " << payload.size()
        << " bytes not divisible by frame size";
    throw Error(msg.str());
  }

  IqBuffer buf;
  buf.sample_rate_hz = meta.sample_rate_hz;
  const std::size_t n = payload.size() / frame;
  buf.samples.reserve(n);
  const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
  if (meta.sample_format == SampleFormat::kCi16) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto re = static_cast<std::int16_t>(get_u16(p + i * 4));
      const auto im = static_cast<std::int16_t>(get_u16(p + i * 4 + 2));
      buf.samples.emplace_back(re / meta.scale, im / meta.scale);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const float re = std::bit_cast<float>(get_u32(p + i * 8));
      const float im = std::bit_cast<float>(get_u32(p + i * 8 + 4));
      buf.samples.emplace_back(re, im);
    }
  }
  return {std::move(buf), meta};
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest: " + path.string());

  Manifest manifest;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      std::ostringstream msg;
      msg << "manifest line " << line_no << ": parse error: " << e.what();
      throw Error(msg.str());
    }
    ManifestEntry entry;
    for (const char* field : {"area_id", "iq_path", "meta_path"}) {
      if (!j.contains(field) || !j[field].is_string() ||
          j[field].get<std::string>().empty()) {
        std::ostringstream msg;
        msg << "manifest line " << line_no << ": missing field '" << field
            << "'";
        throw Error(msg.str());
      }
    }
    entry.area_id = j["area_id"].get<std::string>();
    entry.iq_path = j["iq_path"].get<std::string>();
    entry.meta_path = j["meta_path"].get<std::string>();
    if (!seen.insert({entry.area_id, entry.iq_path}).second) {
      std::ostringstream msg;
      msg << "manifest line " << line_no << ": duplicate entry ("
          << entry.area_id << ", " << entry.iq_path << ")";
      throw Error(msg.str());
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

}  // namespace chansounder::io
