// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "satdash/engine/rng.hpp"
#include "satdash/engine/sim_time.hpp"

namespace satdash::cc {

using engine::Duration;
using engine::SimTime;
using PacketNumber = std::uint64_t;

enum class Algorithm { NewReno, Cubic, Bbr };

std::string_view to_string(Algorithm a);
/// Accepts "newreno", "cubic", "bbr" (case-insensitive).
std::optional<Algorithm> parse_algorithm(std::string_view s);

/// Delivery-rate sample computed by the transport for each ACK, following the
/// per-packet (delivered, delivered_time, first_sent_time) bookkeeping used by
/// BBR.
struct RateSample {
  bool valid = false;
  double delivery_rate_bps = 0.0;  // payload bits per second
  std::uint64_t delivered = 0;     // bytes delivered over `interval`
  Duration interval{0};
  std::uint64_t prior_delivered = 0;  // connection delivered count when the sampled packet was sent
  bool is_app_limited = false;
};

struct AckEvent {
  SimTime now{};
  std::uint64_t acked_bytes = 0;
  std::optional<Duration> rtt_sample;  // latest RTT if the largest acked packet was newly acked
  Duration min_rtt{0};                 // zero until the first sample
  Duration smoothed_rtt{0};
  PacketNumber largest_acked = 0;
  std::uint64_t prior_in_flight = 0;
  std::uint64_t bytes_in_flight = 0;  // after removing acked and lost packets
  std::uint64_t total_delivered = 0;  // connection-wide delivered bytes after this ACK
  std::uint64_t newly_lost_bytes = 0;
  /// True when the sender was not cwnd-limited (app- or pacing-limited), so
  /// window growth would not be validated by the network.
  bool app_limited = false;
  RateSample rate;
};

struct TimeoutEvent {
  SimTime now{};
  PacketNumber largest_sent = 0;
};

struct LossEvent {
  SimTime now{};
  std::uint64_t lost_bytes = 0;
  PacketNumber largest_lost = 0;
  PacketNumber largest_sent = 0;
  std::uint64_t bytes_in_flight = 0;  // after removing lost packets
};

/// Common surface for every congestion controller. All byte counts are
/// stream payload bytes; `mss` is the payload carried by a full packet.
class CongestionController {
 public:
  virtual ~CongestionController() = default;

  virtual Algorithm algorithm() const = 0;

  /// `prior_in_flight` excludes the packet being sent.
  virtual void on_packet_sent(SimTime /*now*/, std::uint64_t /*bytes*/, std::uint64_t /*prior_in_flight*/) {}
  virtual void on_ack(const AckEvent& ev) = 0;
  /// Fast-retransmit style loss (packet or time threshold), not RTO.
  virtual void on_loss(const LossEvent& ev) = 0;
  virtual void on_timeout(const TimeoutEvent& ev) = 0;

  virtual std::uint64_t cwnd_bytes() const = 0;
  /// Bits per second; derived from the configured initial RTT until a sample arrives.
  virtual double pacing_rate_bps() const = 0;
  /// Whether the transport should space packets at pacing_rate_bps().
  virtual bool paces() const = 0;
  virtual std::string_view mode() const = 0;
  virtual std::uint64_t ssthresh_bytes() const { return UINT64_MAX; }
};

struct CcParams {
  std::uint32_t mss = 1200;
  std::uint32_t initial_cwnd_packets = 10;
  std::uint64_t initial_ssthresh = 65535;
  Duration initial_rtt = std::chrono::milliseconds(333);
  /// Pace NewReno/CUBIC at 2x (slow start) or 1.2x (avoidance) cwnd/srtt.
  bool pace_loss_based = false;
};

std::unique_ptr<CongestionController> make_controller(Algorithm a, const CcParams& params, engine::SeededRng rng);

}  // namespace satdash::cc
