// SPDX-License-Identifier: Apache-2.0
#include "satdash/transport/config.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

#include "satdash/netpath/link.hpp"
#include "satdash/transport/frames.hpp"

namespace satdash::transport {

std::string_view to_string(TransportMode m) { return m == TransportMode::TcpLike ? "TCP" : "QUIC"; }

std::optional<TransportMode> parse_mode(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "tcp" || lower == "tcplike") return TransportMode::TcpLike;
  if (lower == "quic" || lower == "quiclike") return TransportMode::QuicLike;
  return std::nullopt;
}

void TransportConfig::validate() const {
  auto positive = [](bool ok, const char* name) {
    if (!ok) throw std::invalid_argument(std::string("transport config: ") + name + " must be positive");
  };
  positive(initial_cwnd_packets > 0, "initial_cwnd_packets");
  positive(initial_ssthresh_bytes > 0, "initial_ssthresh");
  positive(idle_timeout > Duration::zero(), "idle_timeout");
  positive(reordering_threshold > 0, "reordering_threshold");
  positive(max_tail_loss_probes > 0, "max_tail_loss_probes");
  positive(min_rto > Duration::zero(), "min_rto");
  positive(delayed_ack_timeout > Duration::zero(), "delayed_ack_timeout");
  positive(initial_rtt > Duration::zero(), "initial_rtt");
  positive(max_payload > 0, "max_payload");
  positive(ack_frequency > 0, "ack_frequency");
  positive(max_send_buffer > 0, "max_send_buffer");
  const std::uint64_t largest_packet =
      kPacketHeaderBytes + std::uint64_t{max_payload} + kAckFrameBaseBytes + kAckRangeBytes * kMaxAckRanges;
  if (largest_packet > netpath::kDefaultMtu)
    throw std::invalid_argument("transport config: max_payload " + std::to_string(max_payload) +
                                " does not fit a " + std::to_string(netpath::kDefaultMtu) + " B packet");
}

}  // namespace satdash::transport
