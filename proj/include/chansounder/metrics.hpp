// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chansounder/types.hpp"

// Per-CIR delay statistics and their aggregation over packet ensembles
// grouped by measurement area.

namespace chansounder::metrics {

struct CirStats {
  double mean_excess_delay_s = 0.0;
  double rms_delay_spread_s = 0.0;
  double total_power = 0.0;
  int num_significant_taps = 0;
};

struct AreaStats {
  std::string area_id;
  long packet_count = 0;
  double median_rms_ds_s = 0.0;
  double mean_rms_ds_s = 0.0;
  double p90_rms_ds_s = 0.0;
  // Empirical CDF: one point per distinct delay-spread value, both
  // coordinates non-decreasing, fractions in (0, 1].
  std::vector<std::pair<double, double>> cdf_points;
};

// First power moment tau_bar = sum(P_k tau_k) / sum(P_k) with P_k = |g_k|^2
// and tau_k = start_offset_s + k * tap_spacing_s.  Error on a zero-power
// CIR.
double mean_excess_delay(const Cir& cir);

// sigma_tau = sqrt(sum(P_k tau_k^2)/sum(P_k) - tau_bar^2).  Moments are
// taken relative to the first nonzero tap, so a single tap gives exactly 0
// and a common delay shift cancels.
double rms_delay_spread(const Cir& cir);

// Apply the estimator's tap threshold, then compute both moments and the
// surviving-tap count/power.  Error when no tap survives.
CirStats cir_stats(const Cir& cir, double noise_floor_power,
                   double margin_db);

// One AreaStats per distinct area_id (ordered by area_id): nearest-rank
// median and p90 of rms_delay_spread_s, arithmetic mean, empirical CDF.
// Empty input gives an empty result.
std::vector<AreaStats> aggregate_area(
    const std::vector<std::pair<std::string, CirStats>>& estimates);

// Nearest-rank percentile of an already sorted ascending sequence:
// the element at rank ceil(p/100 * n), 1-based.  p in (0, 100].
double nearest_rank_percentile(const std::vector<double>& sorted_values,
                               double p);

}  // namespace chansounder::metrics
