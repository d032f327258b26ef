// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "satdash/engine/rng.hpp"
#include "satdash/engine/simulator.hpp"

namespace satdash::netpath {

using engine::Duration;
using engine::SimTime;

using NodeId = std::uint32_t;

inline constexpr std::uint32_t kDefaultMtu = 1500;

/// Base for whatever a transport puts inside a packet. The path never looks
/// inside it.
struct PacketPayload {
  virtual ~PacketPayload() = default;
};

struct Packet {
  std::uint32_t size_bytes = 0;
  NodeId src = 0;
  NodeId dst = 0;
  SimTime enqueue_time{};
  std::shared_ptr<const PacketPayload> payload;
};

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Piecewise-constant link rate. The first point must be at t = 0; each rate
/// holds until the next point, the last one forever.
class RateTrace {
 public:
  struct Point {
    SimTime start;
    std::uint64_t rate_bps;
  };

  RateTrace() = default;
  explicit RateTrace(std::vector<Point> points);

  static RateTrace constant(std::uint64_t rate_bps);

  /// Text format: one `<time_s> <rate_bps>` pair per line, times sorted and
  /// starting at 0. Blank lines and `#` comments are ignored.
  static RateTrace parse(std::istream& in);
  static RateTrace load(const std::string& path);

  std::uint64_t rate_at(SimTime t) const;

  /// Time at which `bits` finish serializing when transmission starts at
  /// `start`. Rounded up to the next nanosecond.
  SimTime transmit_finish(SimTime start, std::uint64_t bits) const;

  const std::vector<Point>& points() const { return points_; }
  std::uint64_t max_rate() const;

 private:
  std::vector<Point> points_;
};

struct LinkSpec {
  RateTrace rate = RateTrace::constant(10'000'000);
  Duration prop_delay = std::chrono::milliseconds(25);
  std::uint32_t queue_capacity = 100;  // packets, including the one being serialized
  double loss_prob = 0.0;

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

enum class Disposition { Queued, DroppedQueueFull, DroppedLoss, DroppedFilter };

struct TransmitOutcome {
  Disposition disposition;
  std::optional<SimTime> arrival;  // set iff Queued
};

struct LinkStats {
  std::uint64_t offered = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_queue = 0;
  std::uint64_t dropped_loss = 0;
  std::uint64_t dropped_filter = 0;
  std::uint64_t offered_bytes = 0;
  std::uint64_t delivered_bytes = 0;

  std::uint64_t in_transit() const { return offered - delivered - dropped_queue - dropped_loss - dropped_filter; }
};

/// Store-and-forward FIFO link with a drop-tail queue and independent
/// per-packet loss.
class Link {
 public:
  using Receiver = std::function<void(Packet)>;
  /// Test hook for scripted drops; returning true drops the packet.
  using DropFilter = std::function<bool(const Packet&)>;

  Link(engine::Simulator& sim, LinkSpec spec, engine::SeededRng rng, std::string name = {});
  Link(const Link&) = delete;
  Link& operator=(const Link&) = delete;

  void set_receiver(Receiver r) { receiver_ = std::move(r); }
  void set_drop_filter(DropFilter f) { drop_filter_ = std::move(f); }

  /// Offers a packet at the current simulation time.
  TransmitOutcome transmit(Packet pkt);

  /// Packets currently held by the link (waiting or serializing).
  std::size_t queue_length();
  const LinkStats& stats() const { return stats_; }
  const LinkSpec& spec() const { return spec_; }
  const std::string& name() const { return name_; }

 private:
  engine::Simulator& sim_;
  LinkSpec spec_;
  engine::SeededRng rng_;
  std::string name_;
  Receiver receiver_;
  DropFilter drop_filter_;
  std::deque<SimTime> finish_times_;
  SimTime busy_until_{};
  LinkStats stats_;
};

}  // namespace satdash::netpath
