// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "satdash/harness/matrix.hpp"
#include "satdash/harness/scenario.hpp"
#include "satdash/harness/simulation.hpp"
#include "satdash/harness/units.hpp"

namespace satdash::harness {
namespace {

using namespace std::chrono_literals;

ScenarioConfig parse(const std::string& text, const std::filesystem::path& base = {}) {
  std::istringstream in(text);
  return parse_scenario(in, "test.conf", base);
}

// --- units -----------------------------------------------------------------

TEST(Units, Durations) {
  EXPECT_EQ(parse_duration("2"), 2s);
  EXPECT_EQ(parse_duration("1.5s"), 1500ms);
  EXPECT_EQ(parse_duration("250ms"), 250ms);
  EXPECT_EQ(parse_duration("10us"), 10us);
  EXPECT_EQ(parse_duration("3 ns"), 3ns);
  EXPECT_EQ(parse_duration("2min"), 120s);
  EXPECT_EQ(parse_duration("1h"), 3600s);
  EXPECT_THROW(parse_duration("5 parsecs"), std::invalid_argument);
  EXPECT_THROW(parse_duration(""), std::invalid_argument);
}

TEST(Units, Rates) {
  EXPECT_DOUBLE_EQ(parse_rate("10Mbps"), 10e6);
  EXPECT_DOUBLE_EQ(parse_rate("6450kbps"), 6.45e6);
  EXPECT_DOUBLE_EQ(parse_rate("1gbps"), 1e9);
  EXPECT_DOUBLE_EQ(parse_rate("400000"), 4e5);
  EXPECT_THROW(parse_rate("fast"), std::invalid_argument);
}

TEST(Units, Bytes) {
  EXPECT_EQ(parse_bytes("512MiB"), 512ull << 20);
  EXPECT_EQ(parse_bytes("2KB"), 2000u);
  EXPECT_EQ(parse_bytes("1KiB"), 1024u);
  EXPECT_EQ(parse_bytes("77"), 77u);
}

TEST(Units, FormatRoundTrips) {
  for (engine::Duration d : {engine::Duration(0), engine::Duration(1), engine::Duration(1500ms), engine::Duration(120s),
                             engine::Duration(123456789)})
    EXPECT_EQ(parse_duration(format_duration(d)), d) << format_duration(d);
  for (double r : {1.0, 4.3e6, 6.45e6, 1e9}) EXPECT_DOUBLE_EQ(parse_rate(format_rate(r)), r);
  for (std::uint64_t b : {0ull, 1000ull, 512ull << 20}) EXPECT_EQ(parse_bytes(format_bytes(b)), b);
  EXPECT_EQ(parse_real(format_real(0.1)), 0.1);
}

// --- scenario --------------------------------------------------------------

TEST(Scenario, EmptyFileGivesDefaults) {
  const ScenarioConfig cfg = parse("");
  const ScenarioConfig def;
  EXPECT_EQ(to_text(cfg), to_text(def));
  EXPECT_EQ(cfg.n_users, 4u);
  EXPECT_EQ(cfg.run_count, 30u);
  EXPECT_EQ(cfg.manifest.segment_duration, 2s);
  EXPECT_EQ(cfg.manifest.content_duration, 60s);
  EXPECT_EQ(cfg.transport.initial_cwnd_packets, 10u);
  EXPECT_EQ(cfg.client_config().estimation_granularity, 50ms);
}

TEST(Scenario, CommentsAndOverrides) {
  const ScenarioConfig cfg = parse(
      "# a comment\n\nrun_count = 5   # trailing\nbackhaul.delay = 30ms\nbackhaul_up.delay = 40ms\ncc = bbr\n"
      "transport = quic\nladder = 1Mbps, 2Mbps, 4Mbps\n");
  EXPECT_EQ(cfg.run_count, 5u);
  EXPECT_EQ(cfg.path.backhaul_down.prop_delay, 30ms);
  // The direction-specific key wins over the generic one regardless of order.
  EXPECT_EQ(cfg.path.backhaul_up.prop_delay, 40ms);
  EXPECT_EQ(cfg.cc_algorithm, cc::Algorithm::Bbr);
  EXPECT_EQ(cfg.transport_mode, transport::TransportMode::QuicLike);
  EXPECT_EQ(cfg.manifest.ladder.size(), 3u);
}

TEST(Scenario, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ScenarioError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("run_count = 3\nmin_rto = 0\n"), 2u);
  EXPECT_EQ(line_of("\n\nno_such_key = 1\n"), 3u);
  EXPECT_EQ(line_of("n_users = 2\nn_users = 3\n"), 2u);
  EXPECT_EQ(line_of("n_users =\n"), 1u);
  EXPECT_EQ(line_of("just words\n"), 1u);
  EXPECT_EQ(line_of("ladder = 2Mbps, 1Mbps\n"), 1u);
  EXPECT_EQ(line_of("cc = vegas\n"), 1u);
  EXPECT_EQ(line_of("n_users = 0\n"), 1u);
}

TEST(Scenario, TextRoundTrip) {
  const ScenarioConfig cfg = parse(
      "n_users = 7\ncc = newreno\nbackhaul_down.rate = 12.5Mbps\naccess_up.loss = 0.01\nsession_limit = 90s\n"
      "estimate_alpha = 0.25\nbuffer_size = 64MiB\nlatency_warmup = 5s\nfdash.horizon = 30s\n");
  const ScenarioConfig again = parse(to_text(cfg));
  EXPECT_EQ(to_text(again), to_text(cfg));
  EXPECT_EQ(again.n_users, 7u);
  EXPECT_DOUBLE_EQ(again.estimate_alpha, 0.25);
}

TEST(Scenario, EveryKeyAppearsInText) {
  const std::string text = to_text(ScenarioConfig{});
  std::set<std::string> generic = {"backhaul.rate", "backhaul.trace", "backhaul.delay", "backhaul.queue",
                                   "backhaul.loss", "access.rate",    "access.trace",   "access.delay",
                                   "access.queue",  "access.loss"};
  for (const auto& k : scenario_keys()) {
    if (generic.count(k) || k.ends_with(".trace") || k == "output_dir") continue;
    EXPECT_NE(text.find(k + " = "), std::string::npos) << k;
  }
}

TEST(Scenario, TraceFileResolvesRelativeToScenario) {
  const auto dir = std::filesystem::temp_directory_path() / "satdash_scenario_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "bh.trace") << "0 5000000\n10 2000000\n";
    std::ofstream(dir / "s.conf") << "backhaul_down.trace = bh.trace\n";
  }
  const ScenarioConfig cfg = load_scenario(dir / "s.conf");
  EXPECT_EQ(cfg.path.backhaul_down.rate.rate_at(engine::at(11s)), 2'000'000u);
  std::filesystem::remove_all(dir);
}

// --- matrix and simulation -------------------------------------------------

TEST(Matrix, DefaultCellsAndSeeds) {
  const auto cells = default_matrix();
  ASSERT_EQ(cells.size(), 5u);
  std::set<std::string> names;
  std::set<std::uint64_t> seeds;
  for (const auto& c : cells) {
    names.insert(c.name());
    for (std::uint32_t r = 0; r < 30; ++r) seeds.insert(run_seed(1, c, r));
  }
  EXPECT_TRUE(names.count("QUIC-BBR"));
  EXPECT_TRUE(names.count("TCP-CUBIC"));
  EXPECT_EQ(seeds.size(), 150u);
  EXPECT_NE(run_seed(1, cells[0], 0), run_seed(2, cells[0], 0));
}

ScenarioConfig small() {
  return parse("n_users = 2\nrun_count = 2\ncontent_duration = 20s\nsession_limit = 60s\n");
}

TEST(Simulation, SameSeedSameResult) {
  const ScenarioConfig cfg = small();
  const Cell cell{transport::TransportMode::QuicLike, cc::Algorithm::Bbr};
  const auto a = run_simulation(cfg, cell, 42);
  const auto b = run_simulation(cfg, cell, 42);
  ASSERT_EQ(a.users.size(), 2u);
  EXPECT_EQ(a.events, b.events);
  EXPECT_EQ(a.end_time, b.end_time);
  for (std::size_t u = 0; u < 2; ++u) {
    EXPECT_EQ(dash::format_log(a.playback_logs[u]), dash::format_log(b.playback_logs[u]));
    EXPECT_EQ(a.users[u].app_bytes, b.users[u].app_bytes);
  }
  EXPECT_EQ(a.users[0].playback, 20s);
}

TEST(Simulation, SeedChangesJitteredRun) {
  const ScenarioConfig cfg = small();
  const Cell cell{transport::TransportMode::TcpLike, cc::Algorithm::Cubic};
  const auto a = run_simulation(cfg, cell, 1);
  const auto b = run_simulation(cfg, cell, 2);
  EXPECT_NE(a.access_rate_factors, b.access_rate_factors);
}

TEST(Simulation, SessionLimitEndsStarvedSessions) {
  const ScenarioConfig cfg = parse("n_users = 1\nbackhaul.rate = 100kbps\nsession_limit = 10s\n");
  const auto r = run_simulation(cfg, {transport::TransportMode::TcpLike, cc::Algorithm::NewReno}, 1);
  EXPECT_EQ(r.users[0].elapsed, 10s);
  EXPECT_LT(r.users[0].playback, 60s);
}

TEST(Matrix, WorkerCountDoesNotChangeResults) {
  const ScenarioConfig cfg = small();
  const std::vector<Cell> cells = {{transport::TransportMode::TcpLike, cc::Algorithm::NewReno},
                                   {transport::TransportMode::QuicLike, cc::Algorithm::Bbr}};
  const auto one = run_matrix(cfg, cells, {1});
  const auto three = run_matrix(cfg, cells, {3});
  EXPECT_EQ(metrics::summary_json(one), metrics::summary_json(three));
  for (std::size_t i = 0; i < cells.size(); ++i) EXPECT_EQ(metrics::per_run_csv(one[i]), metrics::per_run_csv(three[i]));
}

TEST(Matrix, RunAndReportWritesResolvedConfig) {
  const auto dir = std::filesystem::temp_directory_path() / "satdash_matrix_test";
  std::filesystem::remove_all(dir);
  ScenarioConfig cfg = small();
  cfg.run_count = 1;
  ASSERT_TRUE(run_and_report(cfg, single_matrix(cfg), dir));
  const ScenarioConfig back = load_scenario(dir / "resolved_config.txt");
  EXPECT_EQ(to_text(back), to_text(cfg));
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.csv"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace satdash::harness
