// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "satdash/engine/sim_time.hpp"
#include "satdash/netpath/link.hpp"

namespace satdash::transport {

using PacketNumber = std::uint64_t;
using StreamId = std::uint64_t;
using ConnectionId = std::uint32_t;

struct StreamFrame {
  StreamId stream = 0;
  std::uint64_t offset = 0;
  std::vector<std::uint8_t> data;
  bool fin = false;
};

/// Inclusive packet-number range.
struct AckRange {
  PacketNumber smallest = 0;
  PacketNumber largest = 0;
};

/// Cumulative-plus-ranges acknowledgment, ranges in descending order.
struct AckFrame {
  PacketNumber largest = 0;
  engine::Duration ack_delay{0};
  std::vector<AckRange> ranges;
};

/// Transport packet carried as the opaque payload of a netpath::Packet.
struct Datagram final : netpath::PacketPayload {
  ConnectionId connection = 0;
  PacketNumber number = 0;
  std::optional<AckFrame> ack;
  std::vector<StreamFrame> frames;

  bool ack_eliciting() const { return !frames.empty(); }
  std::uint64_t payload_bytes() const {
    std::uint64_t n = 0;
    for (const auto& f : frames) n += f.data.size();
    return n;
  }
};

/// Fixed per-packet header overhead on the wire (IP + UDP/TCP + transport header).
inline constexpr std::uint32_t kPacketHeaderBytes = 48;
inline constexpr std::uint32_t kAckFrameBaseBytes = 8;
inline constexpr std::uint32_t kAckRangeBytes = 8;
// Keeps a full data packet with a maximal ACK frame within a 1500 B MTU.
inline constexpr std::size_t kMaxAckRanges = 30;

inline std::uint32_t ack_frame_bytes(const AckFrame& a) {
  return kAckFrameBaseBytes + kAckRangeBytes * static_cast<std::uint32_t>(a.ranges.size());
}

}  // namespace satdash::transport
