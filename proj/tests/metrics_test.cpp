// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <random>
#include <vector>

#include "satdash/metrics/aggregate.hpp"
#include "satdash/metrics/fairness.hpp"
#include "satdash/metrics/report.hpp"
#include "satdash/metrics/session.hpp"

namespace satdash::metrics {
namespace {

using namespace std::chrono_literals;
using dash::PlaybackEvent;
using dash::PlaybackEventKind;
using engine::at;

// --- jain ------------------------------------------------------------------

TEST(Jain, Examples) {
  EXPECT_DOUBLE_EQ(jain_index(std::vector<double>{5, 5, 5, 5}), 1.0);
  EXPECT_NEAR(jain_index(std::vector<double>{1, 2, 3}), 36.0 / 42.0, 1e-15);
  EXPECT_DOUBLE_EQ(jain_index(std::vector<double>{7}), 1.0);
  EXPECT_DOUBLE_EQ(jain_index(std::vector<double>{1, 0, 0, 0}), 0.25);
}

TEST(Jain, Undefined) {
  EXPECT_THROW(jain_index(std::vector<double>{}), JainUndefined);
  EXPECT_THROW(jain_index(std::vector<double>{0, 0}), JainUndefined);
  EXPECT_THROW(jain_index(std::vector<double>{1, -1}), std::invalid_argument);
  EXPECT_FALSE(try_jain_index(std::vector<double>{0, 0}));
  EXPECT_TRUE(try_jain_index(std::vector<double>{0, 1}));
}

TEST(Jain, BoundsScaleInvarianceAndOracle) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> val(0.0, 1e7);
  std::uniform_int_distribution<int> len(1, 32);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> x(static_cast<std::size_t>(len(gen)));
    for (auto& v : x) v = val(gen);
    const double j = jain_index(x);
    const double n = static_cast<double>(x.size());
    ASSERT_GE(j, 1.0 / n - 1e-12);
    ASSERT_LE(j, 1.0);
    std::vector<double> scaled = x;
    for (auto& v : scaled) v *= 3.7;
    ASSERT_NEAR(jain_index(scaled), j, 1e-12);
    // Pairwise form: J = 1 - sum_{i<k} (x_i - x_k)^2 / (n * sum x^2).
    long double sq = 0.0L, pair = 0.0L;
    for (double a : x) sq += static_cast<long double>(a) * a;
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t k = i + 1; k < x.size(); ++k) pair += std::pow(static_cast<long double>(x[i]) - x[k], 2);
    const double oracle = static_cast<double>(1.0L - pair / (static_cast<long double>(n) * sq));
    ASSERT_NEAR(j, oracle, 1e-9 * oracle);
  }
}

// --- stats -----------------------------------------------------------------

TEST(Stats, MedianMeanQuantile) {
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 3, 2}), 2.5);
  EXPECT_DOUBLE_EQ(mean(std::vector<double>{1, 2, 3, 4}), 2.5);
  EXPECT_THROW(median({}), std::invalid_argument);
  // Type 7 matches R's default: quantile(1:10, 0.25) = 3.25.
  std::vector<double> v(10);
  for (int i = 0; i < 10; ++i) v[static_cast<std::size_t>(i)] = i + 1;
  EXPECT_DOUBLE_EQ(quantile(v, 0.25), 3.25);
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 1.0), 10.0);
  const Quartiles q = quartiles(v);
  EXPECT_DOUBLE_EQ(q.median, 5.5);
  EXPECT_DOUBLE_EQ(q.q3, 7.75);
}

TEST(Stats, EmpiricalCdf) {
  const Cdf c = empirical_cdf({3, 1, 3, 2});
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], std::make_pair(1.0, 0.25));
  EXPECT_EQ(c[1], std::make_pair(2.0, 0.5));
  EXPECT_EQ(c[2], std::make_pair(3.0, 1.0));
  EXPECT_TRUE(empirical_cdf({}).empty());
}

// --- sessions --------------------------------------------------------------

PlaybackEvent ev(double t, PlaybackEventKind kind, double pos = 0.0, double bitrate = 0.0) {
  PlaybackEvent e;
  e.t = at(engine::from_seconds(t));
  e.kind = kind;
  e.position = engine::from_seconds(pos);
  e.bitrate_bps = bitrate;
  return e;
}

TEST(Session, CleanSession) {
  const dash::PlaybackLog log = {ev(0, PlaybackEventKind::Start), ev(0, PlaybackEventKind::RepSwitch, 0, 1e6),
                                 ev(60, PlaybackEventKind::End, 60)};
  const SessionMetrics m = compute_session(log, {});
  EXPECT_EQ(m.playback, 60s);
  EXPECT_EQ(m.interruption, 0s);
  EXPECT_EQ(m.stall_count, 0u);
  EXPECT_DOUBLE_EQ(m.avg_playback_bitrate_bps, 1e6);
}

TEST(Session, TimeWeightedBitrate) {
  const dash::PlaybackLog log = {ev(0, PlaybackEventKind::Start), ev(0, PlaybackEventKind::RepSwitch, 0, 1e6),
                                 ev(30, PlaybackEventKind::RepSwitch, 30, 3e6), ev(60, PlaybackEventKind::End, 60)};
  EXPECT_DOUBLE_EQ(compute_session(log, {}).avg_playback_bitrate_bps, 2e6);
}

TEST(Session, StallsAndStartup) {
  const dash::PlaybackLog log = {
      ev(1, PlaybackEventKind::Start),      ev(1, PlaybackEventKind::RepSwitch, 0, 1e6),
      ev(2, PlaybackEventKind::StallBegin, 1), ev(3, PlaybackEventKind::StallEnd, 1),
      ev(10, PlaybackEventKind::StallBegin, 8), ev(11, PlaybackEventKind::StallEnd, 8),
      ev(20, PlaybackEventKind::End, 17)};
  const SessionMetrics m = compute_session(log, {});
  EXPECT_EQ(m.interruption, 2s);
  EXPECT_EQ(m.stall_count, 2u);
  EXPECT_EQ(m.startup, 1s);
  EXPECT_EQ(m.elapsed, 20s);
  EXPECT_EQ(m.playback + m.interruption + m.startup + m.residual, m.elapsed);
  EXPECT_EQ(m.residual, 0s);
}

TEST(Session, OpenStallRunsToEnd) {
  const dash::PlaybackLog log = {ev(0, PlaybackEventKind::Start), ev(5, PlaybackEventKind::StallBegin, 5),
                                 ev(9, PlaybackEventKind::End, 5)};
  const SessionMetrics m = compute_session(log, {});
  EXPECT_EQ(m.interruption, 4s);
  EXPECT_EQ(m.stall_count, 1u);
}

TEST(Session, NeverStarted) {
  const SessionMetrics empty = compute_session({}, {});
  EXPECT_EQ(empty.stall_count, 1u);
  EXPECT_FALSE(empty.started);

  const dash::PlaybackLog log = {ev(3, PlaybackEventKind::SegmentDone), ev(120, PlaybackEventKind::End)};
  const SessionMetrics m = compute_session(log, {});
  EXPECT_EQ(m.interruption, 120s);
  EXPECT_EQ(m.stall_count, 1u);
  EXPECT_EQ(m.playback, 0s);
}

TEST(Session, LatencyAndBytesFromTrace) {
  std::vector<transport::TransportEvent> trace;
  for (int ms : {100, 300, 200, 50}) {
    transport::TransportEvent e;
    e.t = at(std::chrono::seconds(ms / 50));
    e.kind = transport::TraceKind::RttSample;
    e.rtt = std::chrono::milliseconds(ms);
    trace.push_back(e);
  }
  transport::TransportEvent d;
  d.kind = transport::TraceKind::Delivered;
  d.bytes = 1'250'000;
  trace.push_back(d);
  const dash::PlaybackLog log = {ev(0, PlaybackEventKind::Start), ev(10, PlaybackEventKind::End, 10)};
  const SessionMetrics m = compute_session(log, trace);
  EXPECT_DOUBLE_EQ(*m.latency_median_ms, 75.0);
  EXPECT_DOUBLE_EQ(*m.latency_mean_ms, 81.25);
  EXPECT_EQ(m.app_bytes, 1'250'000u);
  EXPECT_DOUBLE_EQ(m.mean_throughput_bps, 1e6);
  // Samples at 1 s and 2 s fall inside a 3 s warm-up.
  const SessionMetrics warm = compute_session(log, trace, engine::kTimeZero, 3s);
  EXPECT_EQ(warm.latency_samples_ms.size(), 2u);
}

// --- aggregate and reports -------------------------------------------------

SessionMetrics user(double playback_s, double interruption_s, std::uint32_t stalls, double tput) {
  SessionMetrics m;
  m.playback = engine::from_seconds(playback_s);
  m.interruption = engine::from_seconds(interruption_s);
  m.stall_count = stalls;
  m.started = true;
  m.mean_throughput_bps = tput;
  m.avg_playback_bitrate_bps = tput / 2;
  m.latency_samples_ms = {10.0, 20.0};
  m.latency_median_ms = 15.0;
  m.latency_mean_ms = 15.0;
  return m;
}

std::vector<RunResult> two_runs() {
  std::vector<RunResult> runs(3);
  runs[0].users = {user(60, 0, 0, 2e6), user(60, 0, 0, 2e6)};
  runs[1].users = {user(50, 10, 3, 1e6), user(60, 0, 1, 3e6)};
  runs[2].error = "boom";
  for (auto& r : runs)
    if (r.ok()) r.fairness = compute_fairness(r.users);
  return runs;
}

TEST(Aggregate, Summary) {
  const auto runs = two_runs();
  const RunAggregate a = aggregate(runs);
  EXPECT_EQ(a.runs, 3u);
  EXPECT_EQ(a.failed_runs, 1u);
  EXPECT_EQ(a.sessions, 4u);
  EXPECT_DOUBLE_EQ(a.median_interruption_s, 0.0);
  EXPECT_DOUBLE_EQ(a.mean_total_stalls, 2.0);
  EXPECT_DOUBLE_EQ(*a.median_latency_ms, 15.0);
  EXPECT_DOUBLE_EQ(*a.jain_throughput, (1.0 + 16.0 / 20.0) / 2.0);
  EXPECT_DOUBLE_EQ(a.playback_quartiles.min, 50.0);
  EXPECT_EQ(a.playback_cdf.back().second, 1.0);
}

TEST(Aggregate, AllRunsFailed) {
  std::vector<RunResult> runs(1);
  runs[0].error = "x";
  EXPECT_THROW(aggregate(runs), std::invalid_argument);
}

TEST(Report, FilesAndJson) {
  CellReport cell;
  cell.scheme = "TCP-CUBIC";
  cell.n_users = 2;
  cell.runs = two_runs();
  cell.summary = aggregate(cell.runs);
  const auto json = nlohmann::json::parse(summary_json({cell}));
  ASSERT_TRUE(json.is_array());
  EXPECT_EQ(json[0]["scheme"], "TCP-CUBIC");
  EXPECT_EQ(format_number(std::nullopt), "nan");
  EXPECT_EQ(format_number(1.5), "1.500000");

  const auto dir = std::filesystem::temp_directory_path() / "satdash_report_test";
  std::filesystem::remove_all(dir);
  write_reports(dir, {cell});
  for (const char* f : {"summary.csv", "summary.json", "playback_duration_boxplot.csv", "per_run_TCP_CUBIC.csv",
                        "cdf/latency_TCP_CUBIC.csv", "cdf/bitrate_TCP_CUBIC.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace satdash::metrics
