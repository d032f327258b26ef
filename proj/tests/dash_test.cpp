// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "satdash/dash/client.hpp"
#include "satdash/dash/fdash.hpp"
#include "satdash/dash/manifest.hpp"
#include "satdash/dash/playback.hpp"
#include "satdash/dash/protocol.hpp"
#include "satdash/dash/server.hpp"
#include "satdash/dash/throughput.hpp"
#include "support/loopback.hpp"

namespace satdash::dash {
namespace {

using namespace std::chrono_literals;
using engine::at;

// --- manifest --------------------------------------------------------------

TEST(Manifest, SegmentSizeFromBitrate) {
  EXPECT_EQ(segment_size_bytes(3e6, 2s), 750000u);
  const Manifest m;
  EXPECT_EQ(m.segment_count(), 30u);
  const Segment s = m.segment(29, 5);
  EXPECT_EQ(s.size_bytes, segment_size_bytes(4.3e6, 2s));
  EXPECT_EQ(s.duration, 2s);
}

TEST(Manifest, ShortLastSegment) {
  Manifest m;
  m.content_duration = 5s;
  EXPECT_EQ(m.segment_count(), 3u);
  EXPECT_EQ(m.segment(2, 0).duration, 1s);
}

TEST(Manifest, UnknownSegmentThrows) {
  const Manifest m;
  EXPECT_THROW(m.segment(30, 0), UnknownSegment);
  EXPECT_THROW(m.segment(0, 6), UnknownSegment);
}

TEST(Ladder, RejectsBadRungs) {
  EXPECT_THROW(Ladder({1e6}), std::invalid_argument);
  EXPECT_THROW(Ladder({1e6, 1e6}), std::invalid_argument);
  EXPECT_THROW(Ladder({2e6, 1e6}), std::invalid_argument);
  EXPECT_THROW(Ladder({0.0, 1e6}), std::invalid_argument);
}

// --- fdash -----------------------------------------------------------------

TEST(Fdash, HoldAtTarget) {
  const FdashController c;
  EXPECT_EQ(c.decide(30.0, 0.0), 1.0);
}

TEST(Fdash, ShortAndFallingDecreases) {
  const FdashController c;
  EXPECT_LT(c.decide(5.0, -0.5), 1.0);
  EXPECT_EQ(c.decide(0.0, -5.0), 0.5);
}

TEST(Fdash, LongAndRisingIncreases) {
  const FdashController c;
  EXPECT_GT(c.decide(45.0, 0.5), 1.0);
  EXPECT_EQ(c.decide(100.0, 5.0), 1.5);
}

TEST(Fdash, MembershipsPartitionUnity) {
  const FdashController c;
  for (double b = 0.0; b <= 60.0; b += 0.5) {
    const Terms t = c.buffer_terms(b);
    EXPECT_NEAR(t.low + t.mid + t.high, 1.0, 1e-12) << b;
  }
  for (double d = -2.0; d <= 2.0; d += 0.1) {
    const Terms t = c.delta_terms(d);
    EXPECT_NEAR(t.low + t.mid + t.high, 1.0, 1e-12) << d;
  }
  EXPECT_EQ(c.buffer_terms(20.0).low, 1.0);
  EXPECT_EQ(c.buffer_terms(40.0).high, 1.0);
  EXPECT_EQ(c.buffer_terms(30.0).mid, 1.0);
}

TEST(Fdash, MonotoneAndContinuousOnGrid) {
  const FdashController c;
  double max_jump = 0.0;
  for (double b = 0.0; b <= 60.0; b += 0.1) {
    for (double d = -2.0; d <= 2.0; d += 0.02) {
      const double f = c.decide(b, d);
      ASSERT_GE(c.decide(b + 0.1, d), f - 1e-12);
      ASSERT_GE(c.decide(b, d + 0.02), f - 1e-12);
      max_jump = std::max({max_jump, c.decide(b + 0.1, d) - f, c.decide(b, d + 0.02) - f});
    }
  }
  EXPECT_LT(max_jump, 0.05);
}

TEST(Fdash, RejectsNegativeBuffer) {
  const FdashController c;
  EXPECT_THROW(c.decide(-1.0, 0.0), std::invalid_argument);
}

TEST(Select, HighestRungWithinBudget) {
  const Ladder ladder({0.5e6, 1e6, 2e6, 3e6});
  EXPECT_EQ(select_representation(ladder, 1.2, 2.0e6).bitrate_bps, 2e6);
  EXPECT_EQ(select_representation(ladder, 1.0, 1.99e6).bitrate_bps, 1e6);
  EXPECT_EQ(select_representation(ladder, 1.5, 10e6).bitrate_bps, 3e6);
  EXPECT_EQ(select_representation(ladder, 0.5, 0.1e6).bitrate_bps, 0.5e6);
  EXPECT_EQ(select_representation(ladder, 1.0, std::nullopt).index, 0u);
}

TEST(Select, HysteresisHoldsUnlessTrendAgrees) {
  const Ladder ladder({0.5e6, 1e6, 2e6, 3e6});
  FdashConfig cfg;
  // Upswitch to 3 Mbit/s on a 2.5 Mbit/s estimate drains the buffer.
  EXPECT_EQ(hold_or_switch(ladder, ladder.at(1), ladder.at(3), 20.0, 2.5e6, cfg).index, 2u);
  EXPECT_EQ(hold_or_switch(ladder, ladder.at(1), ladder.at(2), 5.0, 2.1e6, cfg).index, 1u);
  // Downswitch skipped while the current rung still grows the buffer past target.
  EXPECT_EQ(hold_or_switch(ladder, ladder.at(2), ladder.at(1), 25.0, 2.2e6, cfg).index, 2u);
  EXPECT_EQ(hold_or_switch(ladder, ladder.at(2), ladder.at(1), 10.0, 1.5e6, cfg).index, 1u);
  cfg.horizon_s = 0.0;
  EXPECT_EQ(hold_or_switch(ladder, ladder.at(1), ladder.at(3), 0.0, 0.1e6, cfg).index, 3u);
  EXPECT_DOUBLE_EQ(projected_buffer(10.0, 2e6, 1e6, 60.0), 70.0);
}

// --- throughput ------------------------------------------------------------

TEST(Throughput, GridRoundingAndEwma) {
  ThroughputEstimator est;
  // 1 s exactly on the grid.
  EXPECT_DOUBLE_EQ(est.on_segment(125000, 1s), 1e6);
  EXPECT_DOUBLE_EQ(*est.estimate_bps(), 1e6);
  // 1.01 s rounds up to 1.05 s.
  const double s = est.on_segment(262500, 1010ms);
  EXPECT_DOUBLE_EQ(s, 2e6);
  EXPECT_DOUBLE_EQ(*est.estimate_bps(), 0.3 * 2e6 + 0.7 * 1e6);
  // Never below one grid step.
  EXPECT_DOUBLE_EQ(est.on_segment(1250, 1ms), 1250 * 8 / 0.05);
  EXPECT_EQ(est.samples(), 3u);
}

// --- playback --------------------------------------------------------------

Segment seg(std::int64_t index, std::uint64_t bytes = 1000) {
  Segment s;
  s.index = static_cast<std::uint32_t>(index);
  s.duration = 2s;
  s.rep = Representation{0, 400e3};
  s.size_bytes = bytes;
  return s;
}

TEST(Playback, StartsAtThresholdStallsAndResumes) {
  PlaybackConfig cfg;
  cfg.content_duration = 10s;
  PlaybackState p(cfg);
  p.add_segment(at(1s), seg(0));
  EXPECT_FALSE(p.started());
  p.add_segment(at(2s), seg(1));
  EXPECT_TRUE(p.playing());
  EXPECT_EQ(p.next_transition(), at(6s));
  p.advance_to(at(7s));
  ASSERT_EQ(p.stalls().size(), 1u);
  EXPECT_EQ(p.stalls()[0].begin, at(6s));
  p.add_segment(at(7s), seg(2));
  EXPECT_FALSE(p.playing());
  p.add_segment(at(8s), seg(3));
  EXPECT_TRUE(p.playing());
  EXPECT_EQ(p.stalls()[0].end, at(8s));
  // The final segment completes the content: playback resumes right away.
  p.advance_to(at(12s));
  p.add_segment(at(13s), seg(4));
  EXPECT_TRUE(p.playing());
  p.advance_to(at(15s));
  EXPECT_TRUE(p.content_done());
  p.finish(at(15s));
  EXPECT_EQ(p.log().back().kind, PlaybackEventKind::End);
  EXPECT_EQ(p.position(), 10s);
}

TEST(Playback, FinishClosesOpenStallAndIsIdempotent) {
  PlaybackState p;
  p.add_segment(at(0s), seg(0));
  p.add_segment(at(0s), seg(1));
  p.advance_to(at(5s));
  p.finish(at(9s));
  p.finish(at(10s));
  ASSERT_EQ(p.stalls().size(), 1u);
  EXPECT_EQ(p.stalls()[0].end, at(9s));
  EXPECT_EQ(std::count_if(p.log().begin(), p.log().end(),
                          [](const PlaybackEvent& e) { return e.kind == PlaybackEventKind::End; }),
            1);
}

TEST(Playback, NeverStarted) {
  PlaybackState p;
  p.add_segment(at(1s), seg(0));
  p.finish(at(120s));
  EXPECT_FALSE(p.started());
  EXPECT_TRUE(p.stalls().empty());
  EXPECT_EQ(p.position(), 0s);
}

TEST(Playback, TickMatchesAdvance) {
  PlaybackState a;
  PlaybackState b;
  for (int i = 0; i < 3; ++i) {
    a.add_segment(at(0s), seg(i));
    b.add_segment(at(0s), seg(i));
  }
  for (int i = 0; i < 70; ++i) playback_tick(a, 100ms);
  b.advance_to(at(7s));
  EXPECT_EQ(a.position(), b.position());
  EXPECT_EQ(format_log(a.log()), format_log(b.log()));
}

TEST(Playback, LogLineFormat) {
  PlaybackEvent ev;
  ev.t = at(1500ms);
  ev.kind = PlaybackEventKind::StallBegin;
  ev.position = 4s;
  EXPECT_EQ(to_line(ev).rfind("1.500000 stall_begin", 0), 0u);
}

// --- protocol --------------------------------------------------------------

TEST(Protocol, RequestRoundTripAcrossArbitrarySplits) {
  std::vector<std::uint8_t> wire;
  std::vector<SegmentRequest> sent;
  for (std::uint32_t i = 0; i < 20; ++i) {
    sent.push_back({i, i % 6});
    const auto b = encode_request(sent.back());
    wire.insert(wire.end(), b.begin(), b.end());
  }
  for (std::size_t chunk : {1u, 3u, 7u, 8u, 13u, 200u}) {
    RequestReader r;
    std::vector<SegmentRequest> got;
    for (std::size_t off = 0; off < wire.size(); off += chunk) {
      const auto n = std::min(chunk, wire.size() - off);
      const auto out = r.feed(std::span(wire).subspan(off, n));
      got.insert(got.end(), out.begin(), out.end());
    }
    EXPECT_EQ(got, sent) << chunk;
    EXPECT_EQ(r.partial_bytes(), 0u);
  }
}

TEST(Protocol, ResponseReaderCountsBodies) {
  std::vector<std::uint8_t> wire;
  for (std::uint64_t len : {5u, 0u, 3u}) {
    const auto h = encode_response_header(len);
    wire.insert(wire.end(), h.begin(), h.end());
    wire.insert(wire.end(), len, 0);
  }
  ResponseReader r;
  std::uint64_t body = 0;
  std::uint32_t done = 0;
  for (std::uint8_t byte : wire) {
    const auto p = r.feed(std::span(&byte, 1));
    body += p.body_bytes;
    done += p.completed;
  }
  EXPECT_EQ(body, 8u);
  EXPECT_EQ(done, 3u);
  EXPECT_EQ(r.last_completed_length(), 3u);
}

TEST(Protocol, BigEndianLayout) {
  const auto b = encode_request({0x01020304, 5});
  EXPECT_EQ(b[0], 1);
  EXPECT_EQ(b[3], 4);
  EXPECT_EQ(b[7], 5);
}

// --- client and server over a loopback -------------------------------------

struct Session {
  testing::Loopback lb;
  DashServer server;
  DashClient client;

  Session(transport::TransportMode mode, std::uint64_t rate, ClientConfig cfg = {})
      : lb(mode, cc::Algorithm::Cubic, testing::link_spec(rate, 20ms), testing::link_spec(rate, 20ms)),
        server(*lb.server, cfg.manifest),
        client(lb.sim, *lb.client, cfg) {}

  void run(engine::Duration limit = 200s) {
    client.start();
    lb.sim.run_until(at(limit));
    client.finish();
  }
};

class ClientServer : public ::testing::TestWithParam<transport::TransportMode> {};

TEST_P(ClientServer, FastPathPlaysEverythingWithoutStalls) {
  Session s(GetParam(), 20'000'000);
  s.run();
  EXPECT_EQ(s.client.segments_completed(), 30u);
  EXPECT_EQ(s.client.playback().position(), 60s);
  EXPECT_TRUE(s.client.playback().stalls().empty());
  EXPECT_EQ(s.server.requests_served(), 30u);
  EXPECT_FALSE(s.server.error());
  std::uint64_t expected = 0;
  const Manifest m;
  for (std::size_t i = 0; i < s.client.selections().size(); ++i)
    expected += m.segment(static_cast<std::uint32_t>(i), s.client.selections()[i]).size_bytes;
  EXPECT_EQ(s.client.body_bytes_received(), expected);
  // The first request has no estimate and takes the lowest rung.
  EXPECT_EQ(s.client.selections().front(), 0u);
}

TEST_P(ClientServer, SlowPathDropsToLowRungs) {
  Session s(GetParam(), 1'000'000);
  s.run();
  const auto& sel = s.client.selections();
  ASSERT_FALSE(sel.empty());
  EXPECT_LE(*std::max_element(sel.begin() + 10, sel.end()), 2u);
}

INSTANTIATE_TEST_SUITE_P(Modes, ClientServer,
                         ::testing::Values(transport::TransportMode::TcpLike, transport::TransportMode::QuicLike));

TEST(Client, DefersRequestsAtTargetBuffer) {
  ClientConfig cfg;
  cfg.manifest.content_duration = 120s;
  Session s(transport::TransportMode::QuicLike, 50'000'000, cfg);
  s.client.start();
  double worst = 0.0;
  for (int i = 1; i <= 120; ++i) {
    s.lb.sim.run_until(at(std::chrono::seconds(i)));
    worst = std::max(worst, engine::to_seconds(s.client.playback().buffer_level()));
  }
  EXPECT_LE(worst, cfg.fdash.target_buffer_s + 2.0);
  EXPECT_GE(worst, cfg.fdash.target_buffer_s - 2.0);
}

TEST(Client, ByteCapLimitsBuffer) {
  ClientConfig cfg;
  cfg.max_buffer_bytes = 2'000'000;
  Session s(transport::TransportMode::TcpLike, 50'000'000, cfg);
  s.client.start();
  std::uint64_t worst = 0;
  for (int i = 1; i <= 60; ++i) {
    s.lb.sim.run_until(at(std::chrono::seconds(i)));
    worst = std::max(worst, s.client.playback().buffered_bytes());
  }
  EXPECT_LE(worst, cfg.max_buffer_bytes);
}

TEST(Server, UnknownSegmentClosesConnection) {
  testing::Loopback lb(transport::TransportMode::TcpLike, cc::Algorithm::Cubic, testing::link_spec(10'000'000, 5ms),
                       testing::link_spec(10'000'000, 5ms));
  const Manifest m;
  DashServer server(*lb.server, m);
  const auto req = encode_request({99, 0});
  lb.client->send(0, req);
  lb.sim.run_until(at(1s));
  ASSERT_TRUE(server.error());
  EXPECT_TRUE(lb.server->closed());
  EXPECT_THROW(DashServer::response_bytes(m, {99, 0}), UnknownSegment);
}

}  // namespace
}  // namespace satdash::dash
