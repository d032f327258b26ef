// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "satdash/dash/manifest.hpp"
#include "satdash/dash/protocol.hpp"
#include "satdash/transport/connection.hpp"

namespace satdash::dash {

/// Stateless segment server. Every request is answered on the stream it
/// arrived on with a body of exactly the segment's size. An unknown segment
/// is fatal: the server records the error and closes the connection.
class DashServer {
 public:
  DashServer(transport::Connection& conn, Manifest manifest);
  DashServer(const DashServer&) = delete;
  DashServer& operator=(const DashServer&) = delete;

  /// Response body length for a request; throws UnknownSegment.
  static std::uint64_t response_bytes(const Manifest& m, SegmentRequest r);

  std::uint64_t requests_served() const { return served_; }
  const std::optional<std::string>& error() const { return error_; }

 private:
  void on_data(transport::StreamId stream, std::span<const std::uint8_t> bytes);

  transport::Connection& conn_;
  Manifest manifest_;
  std::map<transport::StreamId, RequestReader> readers_;
  std::uint64_t served_ = 0;
  std::optional<std::string> error_;
};

}  // namespace satdash::dash
