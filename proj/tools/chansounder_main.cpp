// SPDX-License-Identifier: Apache-2.0
//
// chansounder: single binary exposing the DSSS channel-sounding workflow.
//   gen                synthesize the training reference waveform
//   chan               push a waveform through a known simulated channel
//   est                estimate CIRs from a capture
//   verify             score estimates against a ground-truth record
//   stats              per-area delay-spread statistics over a manifest
//   fixedpoint-report  fixed-point vs float correlator comparison
//
// Exit codes: 0 success, 1 operational failure, 2 usage error.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "chansounder/channel.hpp"
#include "chansounder/estimator.hpp"
#include "chansounder/fixedpoint.hpp"
#include "chansounder/io.hpp"
#include "chansounder/metrics.hpp"
#include "chansounder/types.hpp"
#include "chansounder/waveform.hpp"

namespace {

namespace cs = chansounder;
using nlohmann::json;

// Shortest-round-trip-ish decimal formatting shared by every CSV writer so
// CLI output is byte-reproducible against library results.
std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_taps_cell(const std::vector<cs::cplx>& taps) {
  std::string out;
  for (std::size_t k = 0; k < taps.size(); ++k) {
    if (k) out += ';';
    out += g17(taps[k].real());
    out += ':';
    out += g17(taps[k].imag());
  }
  return out;
}

struct FixedSpec {
  int total_bits = 12;
  int frac_bits = 10;
  int acc_bits = 24;
};

// Grammar: total:frac:acc, e.g. "12:10:24".
FixedSpec parse_fixed_spec(const std::string& s) {
  FixedSpec spec;
  char extra;
  if (std::sscanf(s.c_str(), "%d:%d:%d%c", &spec.total_bits, &spec.frac_bits,
                  &spec.acc_bits, &extra) != 3) {
    throw CLI::ValidationError("--fixed",
                               "expected total:frac:acc, e.g. 12:10:24");
  }
  return spec;
}

std::string validate_fixed_spec(const std::string& s) {
  try {
    const FixedSpec spec = parse_fixed_spec(s);
    cs::fixedpoint::FixedPointFormat fmt;
    fmt.total_bits = spec.total_bits;
    fmt.frac_bits = spec.frac_bits;
    cs::fixedpoint::validate_format(fmt);
    if (spec.acc_bits < 2 * spec.total_bits || spec.acc_bits > 64) {
      return "acc_bits must be in [2*total_bits, 64]";
    }
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

// Tap-list grammar: comma-separated delay_samples:magnitude:phase_deg.
cs::Cir parse_taps(const std::string& s, double sample_rate_hz) {
  std::map<long, cs::cplx> taps;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    long d;
    double mag, deg;
    char extra;
    if (std::sscanf(item.c_str(), "%ld:%lf:%lf%c", &d, &mag, &deg, &extra) !=
        3) {
      throw cs::Error("bad tap '" + item +
                      "': expected delay_samples:magnitude:phase_deg");
    }
    if (d < 0) throw cs::Error("tap delay must be non-negative: " + item);
    if (mag < 0.0) throw cs::Error("tap magnitude must be >= 0: " + item);
    if (!taps.emplace(d, std::polar(mag, deg * M_PI / 180.0)).second) {
      throw cs::Error("duplicate tap delay " + std::to_string(d));
    }
  }
  if (taps.empty()) throw cs::Error("empty tap list");
  cs::Cir cir;
  cir.tap_spacing_s = 1.0 / sample_rate_hz;
  cir.start_offset_s = 0.0;
  cir.taps.assign(static_cast<std::size_t>(taps.rbegin()->first) + 1,
                  cs::cplx{0.0, 0.0});
  for (const auto& [d, g] : taps) {
    cir.taps[static_cast<std::size_t>(d)] = g;
  }
  return cir;
}

cs::waveform::ReferenceWaveform load_reference(const std::string& path) {
  auto [buf, meta] = cs::io::read_iq(path);
  return cs::waveform::ReferenceWaveform::from_samples(
      std::move(buf.samples), meta.sample_rate_hz,
      meta.description.empty() ? "ref:" + path : meta.description);
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw cs::Error("cannot write file: " + path.string());
  out << text;
  if (!out) throw cs::Error("short write to file: " + path.string());
}

// ---------------------------------------------------------------- gen ----

struct GenArgs {
  std::string out;
  int sync_bits = 128;
  int samples_per_chip = 2;
  int seed = 0x7f;
  double chip_rate_hz = 11.0e6;
  std::string pulse = "rect";
  double rc_rolloff = 0.35;
  std::string format = "cf32";
  double scale = 32767.0;
};

void run_gen(const GenArgs& a) {
  cs::waveform::WaveformConfig cfg;
  cfg.sync_length_bits = a.sync_bits;
  cfg.samples_per_chip = a.samples_per_chip;
  cfg.scrambler_seed = static_cast<std::uint8_t>(a.seed);
  cfg.chip_rate_hz = a.chip_rate_hz;
  cfg.pulse_shape = a.pulse == "rc"
                        ? cs::waveform::PulseShape::kRaisedCosine
                        : cs::waveform::PulseShape::kRectangular;
  cfg.rc_rolloff = a.rc_rolloff;
  const auto ref = cs::waveform::synthesize_reference(cfg);

  cs::IqBuffer buf;
  buf.samples = ref.samples();
  buf.sample_rate_hz = ref.sample_rate_hz();
  cs::io::IqFileMeta meta;
  meta.sample_rate_hz = ref.sample_rate_hz();
  meta.sample_format = cs::io::sample_format_from_string(a.format);
  meta.scale = a.scale;
  meta.description = ref.id();
  cs::io::write_iq(a.out, buf, meta);
  std::cout << "wrote " << buf.samples.size() << " samples to " << a.out
            << " (" << a.format << ", " << g17(meta.sample_rate_hz)
            << " Hz)\n";
}

// --------------------------------------------------------------- chan ----

struct ChanArgs {
  std::string in;
  std::string out;
  std::string taps = "0:1:0";
  double snr_db = std::numeric_limits<double>::infinity();
  double cfo_hz = 0.0;
  long offset = 0;
  std::uint64_t noise_seed = 0;
  std::string truth_out;
  std::string format = "cf32";
  double scale = 32767.0;
  std::string interp = "integer";
};

void run_chan(const ChanArgs& a) {
  auto [tx, in_meta] = cs::io::read_iq(a.in);

  cs::channel::ChannelConfig cfg;
  cfg.cir = parse_taps(a.taps, tx.sample_rate_hz);
  cfg.snr_db = a.snr_db;
  cfg.cfo_hz = a.cfo_hz;
  cfg.timing_offset_samples = a.offset;
  cfg.noise_seed = a.noise_seed;
  cfg.interp = a.interp == "sinc" ? cs::channel::TapInterp::kWindowedSinc
                                  : cs::channel::TapInterp::kInteger;
  const cs::IqBuffer rx = cs::channel::simulate(tx, cfg);

  cs::io::IqFileMeta meta;
  meta.sample_rate_hz = rx.sample_rate_hz;
  meta.center_freq_hz = in_meta.center_freq_hz;
  meta.sample_format = cs::io::sample_format_from_string(a.format);
  meta.scale = a.scale;
  meta.description = "simulated channel capture";
  cs::io::write_iq(a.out, rx, meta);

  if (!a.truth_out.empty()) {
    json truth;
    truth["sample_rate_hz"] = rx.sample_rate_hz;
    truth["timing_offset_samples"] = a.offset;
    truth["cfo_hz"] = a.cfo_hz;
    if (std::isfinite(a.snr_db)) {
      truth["snr_db"] = a.snr_db;
    } else {
      truth["snr_db"] = "inf";
    }
    truth["noise_seed"] = a.noise_seed;
    json taps = json::array();
    for (std::size_t k = 0; k < cfg.cir.taps.size(); ++k) {
      if (cfg.cir.taps[k] == cs::cplx{0.0, 0.0}) continue;
      taps.push_back({{"delay_samples", k},
                      {"re", cfg.cir.taps[k].real()},
                      {"im", cfg.cir.taps[k].imag()}});
    }
    truth["taps"] = taps;
    write_text_file(a.truth_out, truth.dump(2) + "\n");
  }
  std::cout << "wrote " << rx.samples.size() << " samples to " << a.out
            << "\n";
}

// ---------------------------------------------------------------- est ----

const char* kEstHeader =
    "packet,offset_samples,cfo_hz_est,noise_floor_power,residual_norm,"
    "num_significant_taps,sample_rate_hz,start_offset_s,tap_spacing_s,taps";
const char* kEstFixedHeader =
    ",fixed_total_bits,fixed_frac_bits,fixed_acc_bits,fixed_max_abs_err,"
    "fixed_sqnr_db,fixed_overflow_events";

struct EstArgs {
  std::string ref;
  std::string in;
  std::string out;
  double lambda = 1e-3;
  int window_taps = 64;
  double detect_threshold = 0.5;
  double tap_margin_db = 6.0;
  bool no_cfo_correction = false;
  std::string fixed;
};

void run_est(const EstArgs& a) {
  const auto ref = load_reference(a.ref);
  auto [rx, rx_meta] = cs::io::read_iq(a.in);

  cs::estimator::EstimatorConfig cfg;
  cfg.lambda = a.lambda;
  cfg.window_taps = a.window_taps;
  cfg.detect_threshold = a.detect_threshold;
  cfg.tap_margin_db = a.tap_margin_db;
  cfg.cfo_correction = !a.no_cfo_correction;
  const auto estimates = cs::estimator::estimate(rx, ref, cfg);

  std::optional<FixedSpec> fixed;
  if (!a.fixed.empty()) fixed = parse_fixed_spec(a.fixed);

  std::ostringstream csv;
  csv << kEstHeader;
  if (fixed) csv << kEstFixedHeader;
  csv << "\n";
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto& e = estimates[i];
    int significant = 0;
    for (const auto& t : e.cir.taps) {
      if (t != cs::cplx{0.0, 0.0}) ++significant;
    }
    csv << i << ',' << e.timing_offset_samples << ',' << g17(e.cfo_hz_est)
        << ',' << g17(e.noise_floor_power) << ',' << g17(e.residual_norm)
        << ',' << significant << ',' << g17(rx.sample_rate_hz) << ','
        << g17(e.cir.start_offset_s) << ',' << g17(e.cir.tap_spacing_s)
        << ',' << format_taps_cell(e.cir.taps);
    if (fixed) {
      cs::fixedpoint::FixedPointFormat fmt;
      fmt.total_bits = fixed->total_bits;
      fmt.frac_bits = fixed->frac_bits;
      const auto rep = cs::fixedpoint::compare_fixed_float(
          rx, ref, fmt, fixed->acc_bits, e.timing_offset_samples,
          a.window_taps);
      csv << ',' << fixed->total_bits << ',' << fixed->frac_bits << ','
          << fixed->acc_bits << ',' << g17(rep.max_abs_err) << ','
          << g17(rep.sqnr_db) << ',' << rep.overflow_events;
    }
    csv << "\n";
  }
  write_text_file(a.out, csv.str());
  std::cout << "wrote " << estimates.size() << " estimate(s) to " << a.out
            << "\n";
}

// ------------------------------------------------------------- verify ----

const char* kVerifyHeader =
    "tap,true_delay_samples,true_re,true_im,matched,est_delay_samples,"
    "est_re,est_im,delay_err_samples,gain_rel_err,nmse_db";

struct TruthRecord {
  double sample_rate_hz = 0.0;
  long timing_offset_samples = 0;
  struct Tap {
    long delay_samples;
    cs::cplx gain;
  };
  std::vector<Tap> taps;
};

TruthRecord read_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cs::Error("cannot open truth record: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw cs::Error("malformed truth record " + path + ": " + e.what());
  }
  TruthRecord t;
  try {
    t.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    t.timing_offset_samples = j.at("timing_offset_samples").get<long>();
    for (const auto& tap : j.at("taps")) {
      t.taps.push_back({tap.at("delay_samples").get<long>(),
                        cs::cplx{tap.at("re").get<double>(),
                                 tap.at("im").get<double>()}});
    }
  } catch (const json::exception& e) {
    throw cs::Error("malformed truth record " + path + ": " + e.what());
  }
  if (t.taps.empty()) throw cs::Error("truth record has no taps: " + path);
  return t;
}

struct EstRow {
  long offset_samples = 0;
  std::vector<cs::cplx> taps;
};

std::vector<EstRow> read_est_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cs::Error("cannot open estimate CSV: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("packet,", 0) != 0) {
    throw cs::Error("estimate CSV missing header: " + path);
  }
  std::vector<EstRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 10) {
      throw cs::Error("estimate CSV row has too few columns: " + path);
    }
    EstRow row;
    row.offset_samples = std::stol(cells[1]);
    std::stringstream taps(cells[9]);
    std::string pair;
    while (std::getline(taps, pair, ';')) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) {
        throw cs::Error("estimate CSV has a malformed taps cell: " + path);
      }
      row.taps.emplace_back(std::stod(pair.substr(0, colon)),
                            std::stod(pair.substr(colon + 1)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct VerifyArgs {
  std::string truth;
  std::string est;
  std::string report;
  double max_nmse_db = std::numeric_limits<double>::quiet_NaN();
  long delay_tol = 1;
};

constexpr double kNmseFloorDb = -120.0;

int run_verify(const VerifyArgs& a) {
  const TruthRecord truth = read_truth(a.truth);
  const std::vector<EstRow> rows = read_est_csv(a.est);
  if (rows.empty()) {
    throw cs::Error("no estimates to score in " + a.est);
  }

  // Score the estimate whose detection offset is closest to the truth.
  const EstRow* best = &rows.front();
  for (const auto& r : rows) {
    if (std::labs(r.offset_samples - truth.timing_offset_samples) <
        std::labs(best->offset_samples - truth.timing_offset_samples)) {
      best = &r;
    }
  }

  // Everything on one absolute sample-delay grid.
  std::map<long, cs::cplx> est_taps;
  for (std::size_t k = 0; k < best->taps.size(); ++k) {
    if (best->taps[k] == cs::cplx{0.0, 0.0}) continue;
    est_taps[best->offset_samples + static_cast<long>(k)] = best->taps[k];
  }
  std::map<long, cs::cplx> true_taps;
  for (const auto& t : truth.taps) {
    true_taps[truth.timing_offset_samples + t.delay_samples] = t.gain;
  }

  double err_pow = 0.0;
  double sig_pow = 0.0;
  {
    std::map<long, std::pair<cs::cplx, cs::cplx>> grid;  // est, truth
    for (const auto& [d, g] : est_taps) grid[d].first = g;
    for (const auto& [d, g] : true_taps) grid[d].second = g;
    for (const auto& [d, pair] : grid) {
      err_pow += std::norm(pair.first - pair.second);
      sig_pow += std::norm(pair.second);
    }
  }
  double nmse_db = kNmseFloorDb;
  if (err_pow > 0.0) {
    nmse_db = std::max(kNmseFloorDb, 10.0 * std::log10(err_pow / sig_pow));
  }

  std::ostringstream csv;
  csv << kVerifyHeader << "\n";
  int matched_count = 0;
  int tap_index = 0;
  for (const auto& t : truth.taps) {
    const long true_d = truth.timing_offset_samples + t.delay_samples;
    // Strongest significant estimated tap within the delay tolerance.
    const cs::cplx* match = nullptr;
    long match_d = 0;
    for (long d = true_d - a.delay_tol; d <= true_d + a.delay_tol; ++d) {
      const auto it = est_taps.find(d);
      if (it == est_taps.end()) continue;
      if (!match || std::norm(it->second) > std::norm(*match)) {
        match = &it->second;
        match_d = d;
      }
    }
    csv << tap_index << ',' << t.delay_samples << ',' << g17(t.gain.real())
        << ',' << g17(t.gain.imag()) << ',';
    if (match) {
      ++matched_count;
      csv << "1," << (match_d - truth.timing_offset_samples) << ','
          << g17(match->real()) << ',' << g17(match->imag()) << ','
          << (match_d - true_d) << ','
          << g17(std::abs(*match - t.gain) / std::abs(t.gain));
    } else {
      csv << "0,,,,,";
    }
    csv << ',' << g17(nmse_db) << "\n";
    ++tap_index;
  }
  if (!a.report.empty()) write_text_file(a.report, csv.str());

  std::cout << "nmse_db=" << g17(nmse_db) << " matched=" << matched_count
            << "/" << truth.taps.size()
            << " offset=" << best->offset_samples << "\n";
  if (!std::isnan(a.max_nmse_db) && nmse_db > a.max_nmse_db) {
    std::cerr << "error: NMSE " << g17(nmse_db) << " dB exceeds limit "
              << g17(a.max_nmse_db) << " dB\n";
    return 1;
  }
  return 0;
}

// -------------------------------------------------------------- stats ----

const char* kStatsHeader =
    "area_id,packet_count,median_rms_ds_s,mean_rms_ds_s,p90_rms_ds_s,"
    "cdf_points";

struct StatsArgs {
  std::string manifest;
  std::string ref;
  std::string out;
  double lambda = 1e-3;
  int window_taps = 64;
  double detect_threshold = 0.5;
  double tap_margin_db = 6.0;
};

void run_stats(const StatsArgs& a) {
  const cs::io::Manifest manifest = cs::io::load_manifest(a.manifest);
  const auto ref = load_reference(a.ref);
  const std::filesystem::path base =
      std::filesystem::path(a.manifest).parent_path();

  cs::estimator::EstimatorConfig cfg;
  cfg.lambda = a.lambda;
  cfg.window_taps = a.window_taps;
  cfg.detect_threshold = a.detect_threshold;
  cfg.tap_margin_db = a.tap_margin_db;

  std::vector<std::pair<std::string, cs::metrics::CirStats>> per_packet;
  for (const auto& entry : manifest.entries) {
    const auto iq_path = base / entry.iq_path;
    const auto meta_path = base / entry.meta_path;
    auto [rx, meta] = cs::io::read_iq(iq_path, meta_path);
    const auto estimates = cs::estimator::estimate(rx, ref, cfg);
    for (const auto& e : estimates) {
      per_packet.emplace_back(
          entry.area_id,
          cs::metrics::cir_stats(e.cir, e.noise_floor_power,
                                 cfg.tap_margin_db));
    }
  }

  const auto areas = cs::metrics::aggregate_area(per_packet);
  std::ostringstream csv;
  csv << kStatsHeader << "\n";
  for (const auto& area : areas) {
    csv << area.area_id << ',' << area.packet_count << ','
        << g17(area.median_rms_ds_s) << ',' << g17(area.mean_rms_ds_s)
        << ',' << g17(area.p90_rms_ds_s) << ',';
    for (std::size_t i = 0; i < area.cdf_points.size(); ++i) {
      if (i) csv << ';';
      csv << g17(area.cdf_points[i].first) << ':'
          << g17(area.cdf_points[i].second);
    }
    csv << "\n";
  }
  write_text_file(a.out, csv.str());
  std::cout << "wrote " << areas.size() << " area row(s) to " << a.out
            << "\n";
}

// -------------------------------------------------- fixedpoint-report ----

struct FixedReportArgs {
  std::string ref;
  std::string in;
  std::string fixed = "12:10:24";
  long offset = 0;
  int window_taps = 64;
};

void run_fixed_report(const FixedReportArgs& a) {
  const auto ref = load_reference(a.ref);
  cs::IqBuffer rx;
  if (a.in.empty()) {
    // Default: the reference correlated with itself.
    rx.samples = ref.samples();
    rx.sample_rate_hz = ref.sample_rate_hz();
  } else {
    rx = cs::io::read_iq(a.in).first;
  }
  const FixedSpec spec = parse_fixed_spec(a.fixed);
  cs::fixedpoint::FixedPointFormat fmt;
  fmt.total_bits = spec.total_bits;
  fmt.frac_bits = spec.frac_bits;
  const auto rep = cs::fixedpoint::compare_fixed_float(
      rx, ref, fmt, spec.acc_bits, a.offset, a.window_taps);
  std::cout << "total_bits=" << spec.total_bits
            << " frac_bits=" << spec.frac_bits
            << " acc_bits=" << spec.acc_bits << "\n"
            << "max_abs_err=" << g17(rep.max_abs_err) << "\n"
            << "sqnr_db=" << g17(rep.sqnr_db) << "\n"
            << "overflow_events=" << rep.overflow_events << "\n";
}

// --------------------------------------------------------------- main ----

int apply_thread_cap() {
  const char* env = std::getenv("CHANSOUNDER_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == nullptr || *end != '\0' || n <= 0) {
    std::cerr << "error: CHANSOUNDER_THREADS must be a positive integer, "
                 "got '"
              << env << "'\n";
    return 2;
  }
#ifdef _OPENMP
  omp_set_num_threads(static_cast<int>(
      std::min(n, static_cast<long>(omp_get_max_threads()))));
#endif
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const int rc = apply_thread_cap(); rc != 0) return rc;

  CLI::App app{"DSSS channel-sounding toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* cmd_gen = app.add_subcommand("gen", "synthesize the DSSS reference");
  cmd_gen->add_option("--out", gen.out, "output IQ path")->required();
  cmd_gen->add_option("--sync-bits", gen.sync_bits, "SYNC length in bits")
      ->check(CLI::PositiveNumber);
  cmd_gen
      ->add_option("--samples-per-chip", gen.samples_per_chip,
                   "integer oversampling per chip")
      ->check(CLI::PositiveNumber);
  cmd_gen->add_option("--seed", gen.seed, "7-bit scrambler seed")
      ->check(CLI::Range(0, 127));
  cmd_gen->add_option("--chip-rate-hz", gen.chip_rate_hz, "chip rate in Hz")
      ->check(CLI::PositiveNumber);
  cmd_gen->add_option("--pulse", gen.pulse, "chip pulse shape")
      ->check(CLI::IsMember({"rect", "rc"}));
  cmd_gen->add_option("--rc-rolloff", gen.rc_rolloff,
                      "raised-cosine rolloff");
  cmd_gen->add_option("--format", gen.format, "sample format")
      ->check(CLI::IsMember({"cf32", "ci16"}));
  cmd_gen->add_option("--scale", gen.scale, "ci16 full-scale amplitude")
      ->check(CLI::PositiveNumber);
  cmd_gen->callback([&gen]() { run_gen(gen); });

  ChanArgs chan;
  auto* cmd_chan =
      app.add_subcommand("chan", "simulate a known multipath channel");
  cmd_chan->add_option("--in", chan.in, "input IQ path")->required();
  cmd_chan->add_option("--out", chan.out, "output IQ path")->required();
  cmd_chan->add_option("--taps", chan.taps,
                       "delay_samples:magnitude:phase_deg, comma-separated");
  cmd_chan->add_option("--snr-db", chan.snr_db, "SNR in dB (inf = clean)");
  cmd_chan->add_option("--cfo-hz", chan.cfo_hz, "carrier frequency offset");
  cmd_chan->add_option("--offset", chan.offset, "leading zero samples")
      ->check(CLI::NonNegativeNumber);
  cmd_chan->add_option("--noise-seed", chan.noise_seed, "AWGN seed");
  cmd_chan->add_option("--truth-out", chan.truth_out,
                       "write the ground-truth JSON record here");
  cmd_chan->add_option("--format", chan.format, "output sample format")
      ->check(CLI::IsMember({"cf32", "ci16"}));
  cmd_chan->add_option("--scale", chan.scale, "ci16 full-scale amplitude")
      ->check(CLI::PositiveNumber);
  cmd_chan->add_option("--interp", chan.interp, "tap delay interpolation")
      ->check(CLI::IsMember({"integer", "sinc"}));
  cmd_chan->callback([&chan]() { run_chan(chan); });

  EstArgs est;
  auto* cmd_est =
      app.add_subcommand("est", "estimate CIRs from a capture");
  cmd_est->add_option("--ref", est.ref, "reference IQ path")->required();
  cmd_est->add_option("--in", est.in, "capture IQ path")->required();
  cmd_est->add_option("--out", est.out, "output CSV path")->required();
  cmd_est->add_option("--lambda", est.lambda, "Tikhonov weight")
      ->check(CLI::NonNegativeNumber);
  cmd_est->add_option("--window-taps", est.window_taps, "estimated lags")
      ->check(CLI::PositiveNumber);
  cmd_est->add_option("--detect-threshold", est.detect_threshold,
                      "normalized correlation threshold in (0,1)");
  cmd_est->add_option("--tap-margin-db", est.tap_margin_db,
                      "significance margin over the noise floor");
  cmd_est->add_flag("--no-cfo-correction", est.no_cfo_correction,
                    "skip CFO estimation and correction");
  cmd_est
      ->add_option("--fixed", est.fixed,
                   "also run the fixed-point path (total:frac:acc)")
      ->check(CLI::Validator(validate_fixed_spec, "FIXEDSPEC"));
  cmd_est->callback([&est]() { run_est(est); });

  VerifyArgs verify;
  auto* cmd_verify = app.add_subcommand(
      "verify", "score estimates against a ground-truth record");
  cmd_verify->add_option("--truth", verify.truth, "truth JSON path")
      ->required();
  cmd_verify->add_option("--est", verify.est, "estimate CSV path")
      ->required();
  cmd_verify->add_option("--report", verify.report,
                         "write the per-tap report CSV here");
  cmd_verify->add_option("--max-nmse-db", verify.max_nmse_db,
                         "fail (exit 1) if NMSE exceeds this");
  cmd_verify
      ->add_option("--delay-tol", verify.delay_tol,
                   "tap-match tolerance in samples")
      ->check(CLI::NonNegativeNumber);
  int verify_rc = 0;
  cmd_verify->callback([&verify, &verify_rc]() {
    verify_rc = run_verify(verify);
  });

  StatsArgs stats;
  auto* cmd_stats = app.add_subcommand(
      "stats", "per-area delay-spread statistics over a manifest");
  cmd_stats->add_option("--manifest", stats.manifest, "manifest path")
      ->required();
  cmd_stats->add_option("--ref", stats.ref, "reference IQ path")->required();
  cmd_stats->add_option("--out", stats.out, "output CSV path")->required();
  cmd_stats->add_option("--lambda", stats.lambda, "Tikhonov weight")
      ->check(CLI::NonNegativeNumber);
  cmd_stats->add_option("--window-taps", stats.window_taps, "estimated lags")
      ->check(CLI::PositiveNumber);
  cmd_stats->add_option("--detect-threshold", stats.detect_threshold,
                        "normalized correlation threshold in (0,1)");
  cmd_stats->add_option("--tap-margin-db", stats.tap_margin_db,
                        "significance margin over the noise floor");
  cmd_stats->callback([&stats]() { run_stats(stats); });

  FixedReportArgs fixed_report;
  auto* cmd_fixed = app.add_subcommand(
      "fixedpoint-report", "fixed-point vs float correlator comparison");
  cmd_fixed->add_option("--ref", fixed_report.ref, "reference IQ path")
      ->required();
  cmd_fixed->add_option("--in", fixed_report.in,
                        "capture IQ path (default: the reference itself)");
  cmd_fixed
      ->add_option("--fixed", fixed_report.fixed,
                   "fixed-point spec (total:frac:acc)")
      ->check(CLI::Validator(validate_fixed_spec, "FIXEDSPEC"));
  cmd_fixed->add_option("--offset", fixed_report.offset, "window offset")
      ->check(CLI::NonNegativeNumber);
  cmd_fixed
      ->add_option("--window-taps", fixed_report.window_taps,
                   "compared lags")
      ->check(CLI::PositiveNumber);
  cmd_fixed->callback([&fixed_report]() { run_fixed_report(fixed_report); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const cs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return verify_rc;
}
