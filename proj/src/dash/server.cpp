// SPDX-License-Identifier: Apache-2.0
#include "satdash/dash/server.hpp"

namespace satdash::dash {

DashServer::DashServer(transport::Connection& conn, Manifest manifest) : conn_(conn), manifest_(std::move(manifest)) {
  manifest_.validate();
  conn_.on_data([this](transport::StreamId s, std::span<const std::uint8_t> b, bool) { on_data(s, b); });
}

std::uint64_t DashServer::response_bytes(const Manifest& m, SegmentRequest r) {
  return m.segment(r.segment, r.rep).size_bytes;
}

void DashServer::on_data(transport::StreamId stream, std::span<const std::uint8_t> bytes) {
  if (error_ || conn_.closed()) return;
  const bool own_stream = conn_.mode() == transport::TransportMode::QuicLike;
  for (const SegmentRequest& req : readers_[stream].feed(bytes)) {
    std::uint64_t body = 0;
    try {
      body = response_bytes(manifest_, req);
    } catch (const UnknownSegment& e) {
      error_ = e.what();
      conn_.close();
      return;
    }
    // Body content is irrelevant to the client; only its length matters.
    std::vector<std::uint8_t> response(kResponseHeaderBytes + body, 0);
    const auto header = encode_response_header(body);
    std::copy(header.begin(), header.end(), response.begin());
    conn_.send(stream, response, own_stream);
    ++served_;
  }
  if (own_stream && readers_[stream].partial_bytes() == 0) readers_.erase(stream);
}

}  // namespace satdash::dash
