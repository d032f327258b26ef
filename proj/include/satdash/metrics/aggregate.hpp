// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "satdash/metrics/session.hpp"

namespace satdash::metrics {

/// Median of a non-empty sample (mean of the middle pair for even sizes).
double median(std::vector<double> values);
double mean(std::span<const double> values);

/// Sample quantile with linear interpolation between order statistics
/// (the "type 7" definition). `p` in [0, 1].
double quantile(std::vector<double> values, double p);

struct Quartiles {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

Quartiles quartiles(std::vector<double> values);

/// Empirical CDF as (value, P[X <= value]) steps, one per distinct value.
using Cdf = std::vector<std::pair<double, double>>;
Cdf empirical_cdf(std::vector<double> values);

struct FairnessReport {
  std::optional<double> jain_throughput;
  std::optional<double> jain_bitrate;
  std::optional<double> jain_playback_duration;
};

FairnessReport compute_fairness(std::span<const SessionMetrics> users);

/// All users of one run.
struct RunResult {
  std::uint32_t run = 0;
  std::uint64_t seed = 0;
  std::vector<SessionMetrics> users;
  FairnessReport fairness;
  std::optional<std::string> error;

  bool ok() const { return !error; }
};

/// Cross-run summary of one (transport, cc) cell. Duration and latency use
/// medians over user sessions; stall counts use the mean over runs of the
/// per-run total; fairness uses the mean over runs.
struct RunAggregate {
  std::size_t runs = 0;
  std::size_t failed_runs = 0;
  std::size_t sessions = 0;

  double median_interruption_s = 0.0;
  double mean_total_stalls = 0.0;
  double mean_stalls_per_session = 0.0;
  std::optional<double> median_latency_ms;
  std::optional<double> mean_latency_ms;
  double median_playback_s = 0.0;
  double mean_playback_s = 0.0;
  double median_bitrate_bps = 0.0;
  double median_throughput_bps = 0.0;
  double mean_startup_s = 0.0;

  std::optional<double> jain_throughput;
  std::optional<double> jain_bitrate;
  std::optional<double> jain_playback_duration;

  Cdf bitrate_cdf;
  Cdf throughput_cdf;
  Cdf playback_cdf;
  Cdf interruption_cdf;
  Cdf latency_cdf;
  Quartiles playback_quartiles;
};

/// Aggregates the successful runs; failed runs are only counted. Requires at
/// least one successful run with at least one user.
RunAggregate aggregate(std::span<const RunResult> runs);

}  // namespace satdash::metrics
