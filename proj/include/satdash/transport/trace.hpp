// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "satdash/engine/sim_time.hpp"
#include "satdash/transport/frames.hpp"

namespace satdash::transport {

using engine::SimTime;

enum class TraceKind : std::uint8_t { Sent, Acked, Lost, Delivered, RttSample, Probe, Timeout };

std::string_view to_string(TraceKind k);

/// One transport event. `bytes` is stream payload for Sent/Acked/Lost and
/// application bytes for Delivered; `rtt` is set for RttSample only.
struct TransportEvent {
  SimTime t{};
  TraceKind kind = TraceKind::Sent;
  PacketNumber packet = 0;
  StreamId stream = 0;
  std::uint64_t bytes = 0;
  engine::Duration rtt{0};
};

/// Collects transport events for one connection. Recording can be limited to
/// a subset of kinds to keep long runs small.
class TransportTrace {
 public:
  static constexpr std::uint32_t kAll = 0xffffffffu;

  explicit TransportTrace(std::uint32_t kinds = kAll) : mask_(kinds) {}

  static constexpr std::uint32_t bit(TraceKind k) { return 1u << static_cast<unsigned>(k); }

  bool wants(TraceKind k) const { return (mask_ & bit(k)) != 0; }
  void record(const TransportEvent& ev) {
    if (wants(ev.kind)) events_.push_back(ev);
  }
  const std::vector<TransportEvent>& events() const { return events_; }
  void clear() { events_.clear(); }

  /// Tab-separated dump: t_ns, kind, packet, stream, bytes, rtt_ns.
  std::string to_tsv() const;

 private:
  std::uint32_t mask_;
  std::vector<TransportEvent> events_;
};

/// Congestion-controller state after each ACK or timeout.
struct CcTracePoint {
  SimTime t{};
  std::uint64_t cwnd_bytes = 0;
  double pacing_rate_bps = 0.0;
  std::string mode;
};

using CcTrace = std::vector<CcTracePoint>;

}  // namespace satdash::transport
