// SPDX-License-Identifier: Apache-2.0
#include "chansounder/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "chansounder/estimator.hpp"

namespace chansounder::metrics {

namespace {

void check_cir(const Cir& cir) {
  detail::require(!cir.taps.empty(), "cir has no taps");
  detail::require(cir.taps.size() == 1 || cir.tap_spacing_s > 0.0,
                  "cir tap spacing must be positive");
}

// Power moments relative to the first nonzero tap.  Working relative keeps
// the single-tap variance exactly zero and makes both moments shift-stable.
struct Moments {
  double total_power = 0.0;
  double m1_rel = 0.0;  // seconds, relative to the first nonzero tap
  double var = 0.0;     // seconds^2
  double first_tau = 0.0;
};

Moments power_moments(const Cir& cir) {
  long first = -1;
  for (std::size_t k = 0; k < cir.taps.size(); ++k) {
    if (std::norm(cir.taps[k]) > 0.0) {
      first = static_cast<long>(k);
      break;
    }
  }
  detail::require(first >= 0, "zero-power CIR");

  double p_sum = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t k = static_cast<std::size_t>(first); k < cir.taps.size();
       ++k) {
    const double p = std::norm(cir.taps[k]);
    if (p == 0.0) continue;
    const double tau =
        static_cast<double>(k - static_cast<std::size_t>(first)) *
        cir.tap_spacing_s;
    p_sum += p;
    m1 += p * tau;
    m2 += p * tau * tau;
  }
  Moments out;
  out.total_power = p_sum;
  out.m1_rel = m1 / p_sum;
  out.var = std::max(0.0, m2 / p_sum - out.m1_rel * out.m1_rel);
  out.first_tau = cir.start_offset_s +
                  static_cast<double>(first) * cir.tap_spacing_s;
  return out;
}

}  // namespace

double mean_excess_delay(const Cir& cir) {
  check_cir(cir);
  const Moments m = power_moments(cir);
  return m.first_tau + m.m1_rel;
}

double rms_delay_spread(const Cir& cir) {
  check_cir(cir);
  return std::sqrt(power_moments(cir).var);
}

CirStats cir_stats(const Cir& cir, double noise_floor_power,
                   double margin_db) {
  check_cir(cir);
  const Cir kept =
      estimator::threshold_taps(cir, noise_floor_power, margin_db);
  int survivors = 0;
  for (const auto& t : kept.taps) {
    if (t != cplx{0.0, 0.0}) ++survivors;
  }
  detail::require(survivors > 0, "no taps above threshold");

  const Moments m = power_moments(kept);
  CirStats out;
  out.mean_excess_delay_s = m.first_tau + m.m1_rel;
  out.rms_delay_spread_s = std::sqrt(m.var);
  out.total_power = m.total_power;
  out.num_significant_taps = survivors;
  return out;
}

double nearest_rank_percentile(const std::vector<double>& sorted_values,
                               double p) {
  detail::require(!sorted_values.empty(), "percentile of an empty set");
  detail::require(p > 0.0 && p <= 100.0, "percentile must be in (0, 100]");
  const double n = static_cast<double>(sorted_values.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  if (rank < 1) rank = 1;
  return sorted_values[rank - 1];
}

std::vector<AreaStats> aggregate_area(
    const std::vector<std::pair<std::string, CirStats>>& estimates) {
  std::map<std::string, std::vector<double>> by_area;
  for (const auto& [area, stats] : estimates) {
    detail::require(!area.empty(), "aggregate_area: empty area_id");
    by_area[area].push_back(stats.rms_delay_spread_s);
  }

  std::vector<AreaStats> out;
  out.reserve(by_area.size());
  for (auto& [area, spreads] : by_area) {
    std::sort(spreads.begin(), spreads.end());
    AreaStats a;
    a.area_id = area;
    a.packet_count = static_cast<long>(spreads.size());
    a.median_rms_ds_s = nearest_rank_percentile(spreads, 50.0);
    a.p90_rms_ds_s = nearest_rank_percentile(spreads, 90.0);
    double mean = 0.0;
    for (double s : spreads) mean += s;
    a.mean_rms_ds_s = mean / static_cast<double>(spreads.size());
    // Empirical CDF with one point per distinct value.
    const double n = static_cast<double>(spreads.size());
    for (std::size_t i = 0; i < spreads.size(); ++i) {
      if (i + 1 < spreads.size() && spreads[i + 1] == spreads[i]) continue;
      a.cdf_points.emplace_back(spreads[i],
                                static_cast<double>(i + 1) / n);
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace chansounder::metrics
