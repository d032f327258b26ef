// SPDX-License-Identifier: Apache-2.0
#include "satdash/metrics/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "satdash/metrics/fairness.hpp"

namespace satdash::metrics {

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("quartiles of an empty sample");
  std::sort(values.begin(), values.end());
  return {values.front(), quantile(values, 0.25), quantile(values, 0.5), quantile(values, 0.75), values.back()};
}

Cdf empirical_cdf(std::vector<double> values) {
  Cdf cdf;
  if (values.empty()) return cdf;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double p = static_cast<double>(i + 1) / n;
    if (!cdf.empty() && cdf.back().first == values[i]) {
      cdf.back().second = p;
    } else {
      cdf.emplace_back(values[i], p);
    }
  }
  return cdf;
}

FairnessReport compute_fairness(std::span<const SessionMetrics> users) {
  std::vector<double> tput, bitrate, playback;
  for (const auto& u : users) {
    tput.push_back(u.mean_throughput_bps);
    bitrate.push_back(u.avg_playback_bitrate_bps);
    playback.push_back(u.playback_s());
  }
  return {try_jain_index(tput), try_jain_index(bitrate), try_jain_index(playback)};
}

namespace {

std::optional<double> mean_of_present(const std::vector<std::optional<double>>& xs) {
  std::vector<double> present;
  for (const auto& x : xs)
    if (x) present.push_back(*x);
  if (present.empty()) return std::nullopt;
  return mean(present);
}

}  // namespace

RunAggregate aggregate(std::span<const RunResult> runs) {
  RunAggregate a;
  a.runs = runs.size();
  std::vector<double> interruption, playback, bitrate, throughput, latency, latency_mean, startup, run_stalls;
  std::vector<std::optional<double>> j_tput, j_bitrate, j_playback;
  double stalls = 0.0;
  for (const auto& r : runs) {
    if (!r.ok()) {
      ++a.failed_runs;
      continue;
    }
    double run_total = 0.0;
    for (const auto& u : r.users) {
      interruption.push_back(u.interruption_s());
      playback.push_back(u.playback_s());
      bitrate.push_back(u.avg_playback_bitrate_bps);
      throughput.push_back(u.mean_throughput_bps);
      startup.push_back(u.startup_s());
      if (u.latency_median_ms) latency.push_back(*u.latency_median_ms);
      if (u.latency_mean_ms) latency_mean.push_back(*u.latency_mean_ms);
      run_total += u.stall_count;
      stalls += u.stall_count;
    }
    run_stalls.push_back(run_total);
    j_tput.push_back(r.fairness.jain_throughput);
    j_bitrate.push_back(r.fairness.jain_bitrate);
    j_playback.push_back(r.fairness.jain_playback_duration);
  }
  a.sessions = playback.size();
  if (a.sessions == 0) throw std::invalid_argument("aggregate: no successful sessions");

  a.median_interruption_s = median(interruption);
  a.mean_total_stalls = mean(run_stalls);
  a.mean_stalls_per_session = stalls / static_cast<double>(a.sessions);
  if (!latency.empty()) a.median_latency_ms = median(latency);
  if (!latency_mean.empty()) a.mean_latency_ms = mean(latency_mean);
  a.median_playback_s = median(playback);
  a.mean_playback_s = mean(playback);
  a.median_bitrate_bps = median(bitrate);
  a.median_throughput_bps = median(throughput);
  a.mean_startup_s = mean(startup);
  a.jain_throughput = mean_of_present(j_tput);
  a.jain_bitrate = mean_of_present(j_bitrate);
  a.jain_playback_duration = mean_of_present(j_playback);
  a.bitrate_cdf = empirical_cdf(bitrate);
  a.throughput_cdf = empirical_cdf(throughput);
  a.playback_cdf = empirical_cdf(playback);
  a.interruption_cdf = empirical_cdf(interruption);
  a.latency_cdf = empirical_cdf(latency);
  a.playback_quartiles = quartiles(playback);
  return a;
}

}  // namespace satdash::metrics
