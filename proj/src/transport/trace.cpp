// SPDX-License-Identifier: Apache-2.0
#include "satdash/transport/trace.hpp"

#include <sstream>

namespace satdash::transport {

std::string_view to_string(TraceKind k) {
  switch (k) {
    case TraceKind::Sent: return "sent";
    case TraceKind::Acked: return "acked";
    case TraceKind::Lost: return "lost";
    case TraceKind::Delivered: return "delivered";
    case TraceKind::RttSample: return "rtt";
    case TraceKind::Probe: return "probe";
    case TraceKind::Timeout: return "timeout";
  }
  return "?";
}

std::string TransportTrace::to_tsv() const {
  std::ostringstream out;
  out << "t_ns\tkind\tpacket\tstream\tbytes\trtt_ns\n";
  for (const auto& e : events_) {
    out << e.t.time_since_epoch().count() << '\t' << to_string(e.kind) << '\t' << e.packet << '\t' << e.stream << '\t'
        << e.bytes << '\t' << e.rtt.count() << '\n';
  }
  return out.str();
}

}  // namespace satdash::transport
