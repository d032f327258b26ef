// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sstream>
#include <vector>

#include "satdash/netpath/link.hpp"
#include "satdash/netpath/path.hpp"

namespace satdash::netpath {
namespace {

using namespace std::chrono_literals;
using engine::at;
using engine::SeededRng;
using engine::Simulator;

Packet make_packet(std::uint32_t size, NodeId src = 0, NodeId dst = 2) {
  Packet p;
  p.size_bytes = size;
  p.src = src;
  p.dst = dst;
  return p;
}

LinkSpec spec(std::uint64_t rate, Duration prop, std::uint32_t queue = 100, double loss = 0.0) {
  LinkSpec s;
  s.rate = RateTrace::constant(rate);
  s.prop_delay = prop;
  s.queue_capacity = queue;
  s.loss_prob = loss;
  return s;
}

TEST(Link, SerializationPlusPropagation) {
  Simulator sim;
  Link link(sim, spec(12'000'000, 25ms), SeededRng(1));
  std::vector<SimTime> arrivals;
  link.set_receiver([&](Packet) { arrivals.push_back(sim.now()); });
  sim.schedule(at(100ms), [&] {
    auto out = link.transmit(make_packet(1500));
    EXPECT_EQ(out.disposition, Disposition::Queued);
    EXPECT_EQ(*out.arrival, at(100ms + 1ms + 25ms));
  });
  sim.run_until(at(1s));
  EXPECT_EQ(arrivals, std::vector<SimTime>{at(126ms)});
}

TEST(Link, FullQueueDrops) {
  Simulator sim;
  Link link(sim, spec(1'000'000, 1ms, 3), SeededRng(1));
  std::vector<Disposition> d;
  for (int i = 0; i < 5; ++i) d.push_back(link.transmit(make_packet(1000)).disposition);
  EXPECT_EQ(d, (std::vector<Disposition>{Disposition::Queued, Disposition::Queued, Disposition::Queued,
                                         Disposition::DroppedQueueFull, Disposition::DroppedQueueFull}));
  EXPECT_EQ(link.stats().dropped_queue, 2u);
}

TEST(Link, QueueDrainsOverTime) {
  Simulator sim;
  Link link(sim, spec(8'000'000, 0ms, 1), SeededRng(1));  // 1000 B = 1 ms
  EXPECT_EQ(link.transmit(make_packet(1000)).disposition, Disposition::Queued);
  EXPECT_EQ(link.transmit(make_packet(1000)).disposition, Disposition::DroppedQueueFull);
  sim.run_until(at(1ms));
  EXPECT_EQ(link.queue_length(), 0u);
  EXPECT_EQ(link.transmit(make_packet(1000)).disposition, Disposition::Queued);
}

TEST(Link, LossProbabilityOneDropsEverything) {
  Simulator sim;
  Link link(sim, spec(10'000'000, 1ms, 1000, 1.0), SeededRng(3));
  int received = 0;
  link.set_receiver([&](Packet) { ++received; });
  for (int i = 0; i < 100; ++i) EXPECT_EQ(link.transmit(make_packet(500)).disposition, Disposition::DroppedLoss);
  sim.run_until(at(1s));
  EXPECT_EQ(received, 0);
}

TEST(Link, FifoAndBackToBackSerialization) {
  Simulator sim;
  Link link(sim, spec(8'000'000, 10ms, 1000), SeededRng(1));
  std::vector<std::pair<std::uint32_t, SimTime>> got;
  link.set_receiver([&](Packet p) { got.emplace_back(p.size_bytes, sim.now()); });
  for (std::uint32_t i = 1; i <= 20; ++i) link.transmit(make_packet(100 * i));
  sim.run_until(at(10s));
  ASSERT_EQ(got.size(), 20u);
  // Work conservation: each packet finishes exactly one serialization after
  // the previous one.
  Duration busy{0};
  for (std::uint32_t i = 1; i <= 20; ++i) {
    busy += Duration{100 * i * 1000};  // 100*i bytes at 1 byte/us
    EXPECT_EQ(got[i - 1].first, 100 * i);
    EXPECT_EQ(got[i - 1].second, at(busy + 10ms));
  }
}

TEST(LinkProperty, ConservationUnderRandomLoad) {
  Simulator sim;
  Link link(sim, spec(5'000'000, 5ms, 8, 0.1), SeededRng(17));
  std::uint64_t delivered = 0;
  link.set_receiver([&](Packet) { ++delivered; });
  SeededRng load(5);
  for (int i = 0; i < 2000; ++i) {
    sim.schedule(at(Duration{static_cast<std::int64_t>(load.below(2'000'000'000))}),
                 [&] { link.transmit(make_packet(static_cast<std::uint32_t>(100 + load.below(1400)))); });
  }
  sim.run_until(at(10s));
  const auto& s = link.stats();
  EXPECT_EQ(s.offered, 2000u);
  EXPECT_EQ(s.delivered, delivered);
  EXPECT_EQ(s.in_transit(), 0u);
  EXPECT_EQ(s.offered, s.delivered + s.dropped_queue + s.dropped_loss + s.dropped_filter);
  EXPECT_GT(s.dropped_queue, 0u);
  EXPECT_GT(s.dropped_loss, 0u);
}

TEST(LinkProperty, LosslessDeepQueueDeliversAllBytes) {
  Simulator sim;
  Link link(sim, spec(2'000'000, 5ms, 1'000'000), SeededRng(2));
  std::uint64_t bytes = 0;
  link.set_receiver([&](Packet p) { bytes += p.size_bytes; });
  std::uint64_t sent = 0;
  for (std::uint32_t i = 0; i < 3000; ++i) {
    const std::uint32_t sz = 40 + (i * 37) % 1460;
    sent += sz;
    link.transmit(make_packet(sz));
  }
  sim.run_until(at(100s));
  EXPECT_EQ(bytes, sent);
}

TEST(RateTrace, FinishSpansRateChange) {
  // 1 Mbit/s for the first 1 ms, then 2 Mbit/s. 3000 bits starting at 0:
  // 1000 bits in the first ms, the remaining 2000 bits take 1 ms more.
  RateTrace tr({{at(0ms), 1'000'000}, {at(1ms), 2'000'000}});
  EXPECT_EQ(tr.transmit_finish(at(0ms), 3000), at(2ms));
  EXPECT_EQ(tr.rate_at(at(999us)), 1'000'000u);
  EXPECT_EQ(tr.rate_at(at(1ms)), 2'000'000u);
  EXPECT_EQ(tr.max_rate(), 2'000'000u);
}

TEST(RateTrace, ParsesTextFormat) {
  std::istringstream in("# capacity\n0 5000000\n\n2.5 1000000  # dip\n4 5000000\n");
  auto tr = RateTrace::parse(in);
  ASSERT_EQ(tr.points().size(), 3u);
  EXPECT_EQ(tr.points()[1].start, at(2500ms));
  EXPECT_EQ(tr.rate_at(at(3s)), 1'000'000u);
}

TEST(RateTrace, ParseErrorsNameTheLine) {
  auto error_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      RateTrace::parse(in);
    } catch (const TraceFormatError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(error_of("0 100\n1 abc\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("0 100\n2 100\n1 100\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("0 0\n").find("line 1"), std::string::npos);
  EXPECT_FALSE(error_of("1 100\n").empty());
  EXPECT_FALSE(error_of("").empty());
}

TEST(LinkSpec, RejectsInvalidValues) {
  LinkSpec s;
  s.queue_capacity = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = LinkSpec{};
  s.loss_prob = 1.5;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  EXPECT_THROW(RateTrace::constant(0), std::invalid_argument);
}

PathConfig two_hop(std::uint64_t rate, Duration bh_prop, Duration acc_prop, std::uint32_t bh_q = 100,
                   std::uint32_t acc_q = 100) {
  PathConfig cfg;
  cfg.backhaul_down = spec(rate, bh_prop, bh_q);
  cfg.backhaul_up = spec(rate, bh_prop, bh_q);
  cfg.access_down = spec(rate, acc_prop, acc_q);
  cfg.access_up = spec(rate, acc_prop, acc_q);
  return cfg;
}

TEST(IabPath, RelayEnqueuesOnAccessAtArrivalTime) {
  Simulator sim;
  IabPath path(sim, two_hop(12'000'000, 25ms, 2ms), 1, SeededRng(1));
  std::vector<SimTime> got;
  path.attach(IabPath::ue(0), [&](Packet) { got.push_back(sim.now()); });
  auto out = path.send(make_packet(1500, IabPath::kServer, IabPath::ue(0)));
  EXPECT_EQ(*out.arrival, at(26ms));  // backhaul arrival at the IAB
  sim.run_until(at(1s));
  // Equal rates, empty queues: sum of per-hop serialization + propagation.
  const Duration per_hop_ser = 1ms;
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0], at((per_hop_ser + 25ms) + (per_hop_ser + 2ms)));
}

TEST(IabPath, UplinkReachesServer) {
  Simulator sim;
  IabPath path(sim, two_hop(8'000'000, 20ms, 5ms), 3, SeededRng(1));
  std::vector<NodeId> from;
  path.attach(IabPath::kServer, [&](Packet p) { from.push_back(p.src); });
  path.send(make_packet(100, IabPath::ue(2), IabPath::kServer));
  sim.run_until(at(1s));
  EXPECT_EQ(from, std::vector<NodeId>{IabPath::ue(2)});
}

TEST(IabPath, AccessQueueFullDropsAtRelay) {
  Simulator sim;
  // Fast backhaul, slow access with room for one packet.
  PathConfig cfg = two_hop(100'000'000, 1ms, 1ms, 100, 1);
  cfg.access_down = spec(1'000'000, 1ms, 1);
  IabPath path(sim, cfg, 1, SeededRng(1));
  int received = 0;
  path.attach(IabPath::ue(0), [&](Packet) { ++received; });
  for (int i = 0; i < 3; ++i) path.send(make_packet(1000, IabPath::kServer, IabPath::ue(0)));
  sim.run_until(at(1s));
  EXPECT_EQ(path.backhaul(Direction::Down).stats().delivered, 3u);
  EXPECT_EQ(path.access(0, Direction::Down).stats().dropped_queue, 2u);
  EXPECT_EQ(received, 1);
}

TEST(IabPath, RejectsOversizedPackets) {
  Simulator sim;
  IabPath path(sim, two_hop(1'000'000, 1ms, 1ms), 1, SeededRng(1));
  EXPECT_THROW(path.send(make_packet(1501, IabPath::kServer, IabPath::ue(0))), std::invalid_argument);
  EXPECT_THROW(path.send(make_packet(100, IabPath::kServer, IabPath::ue(5))), std::invalid_argument);
}

TEST(IabPath, LossStreamsAreIndependentPerUser) {
  // Adding a user must not change which packets user 0 loses.
  auto losses_of_user0 = [](std::size_t n_users) {
    Simulator sim;
    PathConfig cfg = two_hop(100'000'000, 1ms, 1ms, 10000, 10000);
    cfg.access_down.loss_prob = 0.3;
    IabPath path(sim, cfg, n_users, SeededRng(1234));
    std::vector<int> got;
    path.attach(IabPath::ue(0), [&](Packet p) { got.push_back(static_cast<int>(p.size_bytes)); });
    for (int i = 0; i < 200; ++i) {
      path.send(make_packet(static_cast<std::uint32_t>(100 + i), IabPath::kServer, IabPath::ue(0)));
      for (std::size_t u = 1; u < n_users; ++u) path.send(make_packet(100, IabPath::kServer, IabPath::ue(u)));
    }
    sim.run_until(at(10s));
    return got;
  };
  EXPECT_EQ(losses_of_user0(1), losses_of_user0(4));
}

}  // namespace
}  // namespace satdash::netpath
