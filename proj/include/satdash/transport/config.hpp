// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "satdash/engine/sim_time.hpp"

namespace satdash::transport {

using engine::Duration;
using namespace std::chrono_literals;

enum class TransportMode { TcpLike, QuicLike };

std::string_view to_string(TransportMode m);
/// Accepts "tcp", "quic" (case-insensitive).
std::optional<TransportMode> parse_mode(std::string_view s);

/// Loss-recovery and congestion parameters of one connection.
struct TransportConfig {
  std::uint32_t initial_cwnd_packets = 10;
  std::uint64_t initial_ssthresh_bytes = 65535;
  Duration idle_timeout = 30s;
  std::uint32_t reordering_threshold = 2;  // packets
  std::uint32_t max_tail_loss_probes = 5;
  Duration min_rto = 200ms;
  Duration delayed_ack_timeout = 25ms;
  Duration initial_rtt = 333ms;

  std::uint32_t max_payload = 1200;  // stream bytes per packet
  std::uint32_t ack_frequency = 2;   // ack-eliciting packets per immediate ACK
  std::uint64_t max_send_buffer = 512ULL * 1024 * 1024;
  bool pace_loss_based = false;

  /// Throws std::invalid_argument naming the first non-positive field.
  void validate() const;
};

}  // namespace satdash::transport
