// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "chansounder/io.hpp"
#include "chansounder/rng.hpp"
#include "chansounder/types.hpp"
#include "testutil.hpp"

using namespace chansounder;
using testutil::TempDir;

namespace {

IqBuffer random_buffer(std::size_t n, std::uint64_t seed) {
  rng::SplitMix64 gen(seed);
  IqBuffer buf;
  buf.sample_rate_hz = 22.0e6;
  buf.samples.resize(n);
  for (auto& v : buf.samples) {
    // Uniform in (-1, 1) keeps ci16 away from the saturation rails.
    v = {2.0 * gen.uniform() - 1.0, 2.0 * gen.uniform() - 1.0};
  }
  return buf;
}

// Random dyadic values with 16-bit numerators: exact in binary32, so a
// cf32 write is lossless with no rounding step in the test itself.
IqBuffer random_float_exact_buffer(std::size_t n, std::uint64_t seed) {
  rng::SplitMix64 gen(seed);
  IqBuffer buf;
  buf.sample_rate_hz = 22.0e6;
  buf.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto re = static_cast<long>(gen.next() % 65536) - 32768;
    const auto im = static_cast<long>(gen.next() % 65536) - 32768;
    buf.samples.emplace_back(re / 32768.0, im / 32768.0);
  }
  return buf;
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("cf32 round trip is bit-exact for float-valued samples") {
  TempDir tmp;
  auto buf = random_float_exact_buffer(257, 1);
  io::IqFileMeta meta;
  meta.sample_rate_hz = buf.sample_rate_hz;
  meta.sample_format = io::SampleFormat::kCf32;
  meta.description = "round trip";
  const auto path = tmp / "rt.iq";
  io::write_iq(path, buf, meta);
  const auto [back, back_meta] = io::read_iq(path);
  REQUIRE(back.samples.size() == buf.samples.size());
  CHECK(back.samples == buf.samples);
  CHECK(back.sample_rate_hz == buf.sample_rate_hz);
  CHECK(back_meta.description == "round trip");
  CHECK(back_meta.sample_format == io::SampleFormat::kCf32);
}

TEST_CASE("ci16 golden bytes") {
  TempDir tmp;
  IqBuffer buf;
  buf.sample_rate_hz = 1.0e6;
  buf.samples = {cplx{0.5, -0.25}, cplx{1.0, -1.0}, cplx{0.123456, 0.9}};
  io::IqFileMeta meta;
  meta.sample_rate_hz = 1.0e6;
  meta.sample_format = io::SampleFormat::kCi16;
  meta.scale = 32767.0;
  const auto path = tmp / "golden.iq";
  io::write_iq(path, buf, meta);

  // Little-endian int16 pairs: 16384, -8192, 32767, -32767, 4045, 29490.
  const unsigned char want[] = {0x00, 0x40, 0x00, 0xe0, 0xff, 0x7f,
                                0x01, 0x80, 0xcd, 0x0f, 0x32, 0x73};
  const std::string got = testutil::read_file(path);
  REQUIRE(got.size() == sizeof(want));
  for (std::size_t i = 0; i < sizeof(want); ++i) {
    CHECK(static_cast<unsigned char>(got[i]) == want[i]);
  }
}

TEST_CASE("cf32 golden bytes") {
  TempDir tmp;
  IqBuffer buf;
  buf.sample_rate_hz = 1.0e6;
  buf.samples = {cplx{1.5, -2.0}};
  io::IqFileMeta meta;
  meta.sample_rate_hz = 1.0e6;
  meta.sample_format = io::SampleFormat::kCf32;
  const auto path = tmp / "golden32.iq";
  io::write_iq(path, buf, meta);
  const unsigned char want[] = {0x00, 0x00, 0xc0, 0x3f,
                                0x00, 0x00, 0x00, 0xc0};
  const std::string got = testutil::read_file(path);
  REQUIRE(got.size() == sizeof(want));
  for (std::size_t i = 0; i < sizeof(want); ++i) {
    CHECK(static_cast<unsigned char>(got[i]) == want[i]);
  }
}

TEST_CASE("ci16 round trip stays within half a quantization step") {
  TempDir tmp;
  const auto buf = random_buffer(1000, 2);
  io::IqFileMeta meta;
  meta.sample_rate_hz = buf.sample_rate_hz;
  meta.sample_format = io::SampleFormat::kCi16;
  meta.scale = 32767.0;
  const auto path = tmp / "q.iq";
  io::write_iq(path, buf, meta);
  const auto [back, _] = io::read_iq(path);
  REQUIRE(back.samples.size() == buf.samples.size());
  const double bound = 1.0 / (2.0 * 32767.0) + 1e-9;
  for (std::size_t i = 0; i < buf.samples.size(); ++i) {
    CHECK(std::abs(back.samples[i].real() - buf.samples[i].real()) <= bound);
    CHECK(std::abs(back.samples[i].imag() - buf.samples[i].imag()) <= bound);
  }
}

TEST_CASE("sidecar metadata round trips") {
  TempDir tmp;
  auto buf = random_buffer(16, 3);
  io::IqFileMeta meta;
  meta.sample_rate_hz = buf.sample_rate_hz;
  meta.center_freq_hz = 2.412e9;
  meta.sample_format = io::SampleFormat::kCi16;
  meta.scale = 8192.0;
  meta.description = "atrium walk 3";
  const auto path = tmp / "m.iq";
  io::write_iq(path, buf, meta);
  const auto [_, back] = io::read_iq(path);
  CHECK(back.sample_rate_hz == meta.sample_rate_hz);
  CHECK(back.center_freq_hz == meta.center_freq_hz);
  CHECK(back.sample_format == io::SampleFormat::kCi16);
  CHECK(back.scale == meta.scale);
  CHECK(back.description == meta.description);
}

TEST_CASE("missing sidecar is a specific error") {
  TempDir tmp;
  const auto path = tmp / "naked.iq";
  write_bytes(path, std::string(8, '\0'));
  const std::string want =
      "missing IQ metadata sidecar: expected " + path.string() + ".meta";
  CHECK_THROWS_WITH_AS(io::read_iq(path), want.c_str(), Error);
}

TEST_CASE("truncated payload is a specific error") {
  TempDir tmp;
  auto buf = random_buffer(4, 4);
  io::IqFileMeta meta;
  meta.sample_rate_hz = buf.sample_rate_hz;
  meta.sample_format = io::SampleFormat::kCi16;
  const auto path = tmp / "trunc.iq";
  io::write_iq(path, buf, meta);
  // Chop the 16-byte payload to 13 bytes.
  write_bytes(path, testutil::read_file(path).substr(0, 13));
  CHECK_THROWS_WITH_AS(
      io::read_iq(path),
      "malformed IQ payload: 13 bytes not divisible by frame size", Error);
}

TEST_CASE("unknown sample format in the sidecar") {
  TempDir tmp;
  const auto path = tmp / "odd.iq";
  write_bytes(path, std::string(8, '\0'));
  write_bytes(tmp / "odd.iq.meta",
              R"({"sample_rate_hz": 1e6, "sample_format": "cu8"})");
  CHECK_THROWS_WITH_AS(io::read_iq(path),
                       "unknown sample_format 'cu8' (expected ci16 or cf32)",
                       Error);
}

TEST_CASE("explicit sidecar path overrides the default") {
  TempDir tmp;
  auto buf = random_float_exact_buffer(8, 5);
  io::IqFileMeta meta;
  meta.sample_rate_hz = buf.sample_rate_hz;
  meta.sample_format = io::SampleFormat::kCf32;
  const auto path = tmp / "a.iq";
  io::write_iq(path, buf, meta);
  std::filesystem::rename(tmp / "a.iq.meta", tmp / "elsewhere.json");
  CHECK_THROWS_AS(io::read_iq(path), Error);
  const auto [back, _] = io::read_iq(path, tmp / "elsewhere.json");
  CHECK(back.samples == buf.samples);
}

TEST_CASE("manifest parsing") {
  TempDir tmp;
  const auto path = tmp / "m.jsonl";
  write_bytes(path,
              R"({"area_id": "a1", "iq_path": "x.iq", "meta_path": "x.iq.meta"})"
              "\n"
              "\n"  // blank lines are skipped
              R"({"area_id": "a2", "iq_path": "y.iq", "meta_path": "y.iq.meta"})"
              "\n");
  const auto m = io::load_manifest(path);
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].area_id == "a1");
  CHECK(m.entries[0].iq_path == "x.iq");
  CHECK(m.entries[1].meta_path == "y.iq.meta");
}

TEST_CASE("manifest rejects missing fields and duplicates") {
  TempDir tmp;
  const auto path = tmp / "bad.jsonl";
  write_bytes(path, R"({"area_id": "a1", "iq_path": "x.iq"})" "\n");
  CHECK_THROWS_WITH_AS(io::load_manifest(path),
                       "manifest line 1: missing field 'meta_path'", Error);

  write_bytes(
      path,
      R"({"area_id": "a1", "iq_path": "x.iq", "meta_path": "m1"})" "\n"
      R"({"area_id": "a1", "iq_path": "x.iq", "meta_path": "m2"})" "\n");
  CHECK_THROWS_AS(io::load_manifest(path), Error);

  // Same capture under two areas is allowed.
  write_bytes(
      path,
      R"({"area_id": "a1", "iq_path": "x.iq", "meta_path": "m1"})" "\n"
      R"({"area_id": "a2", "iq_path": "x.iq", "meta_path": "m1"})" "\n");
  CHECK(io::load_manifest(path).entries.size() == 2);

  CHECK_THROWS_AS(io::load_manifest(tmp / "absent.jsonl"), Error);
}
