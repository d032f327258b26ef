// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "satdash/dash/fdash.hpp"
#include "satdash/dash/manifest.hpp"
#include "satdash/dash/playback.hpp"
#include "satdash/dash/protocol.hpp"
#include "satdash/dash/throughput.hpp"
#include "satdash/engine/simulator.hpp"
#include "satdash/transport/connection.hpp"

namespace satdash::dash {

struct ClientConfig {
  Manifest manifest;
  FdashConfig fdash;
  /// Defaults to two segment durations when unset.
  std::optional<Duration> resume_threshold;
  std::uint64_t max_buffer_bytes = 512ull << 20;
  Duration estimation_granularity = std::chrono::milliseconds(50);
  double estimate_alpha = 0.3;

  void validate() const;
  Duration effective_resume_threshold() const { return resume_threshold.value_or(2 * manifest.segment_duration); }
};

/// DASH client on one long-lived connection. Segment requests are strictly
/// serialized: the next one goes out when the previous response completes,
/// unless the buffer (in seconds or bytes) is full, in which case it waits
/// for playback to drain. QuicLike sends each request on a new stream;
/// TcpLike reuses stream 0.
class DashClient {
 public:
  using FinishHandler = std::function<void()>;

  DashClient(engine::Simulator& sim, transport::Connection& conn, ClientConfig cfg);
  DashClient(const DashClient&) = delete;
  DashClient& operator=(const DashClient&) = delete;

  void on_finished(FinishHandler h) { on_finished_ = std::move(h); }

  /// Issues the first request at the current time.
  void start();
  /// Ends the session now (simulation horizon or failure).
  void finish();

  bool finished() const { return playback_.finished(); }
  const PlaybackState& playback() const { return playback_; }
  const PlaybackLog& log() const { return playback_.log(); }
  const ThroughputEstimator& estimator() const { return estimator_; }
  std::uint64_t body_bytes_received() const { return body_bytes_; }
  std::uint32_t segments_completed() const { return next_segment_ - (outstanding_ ? 1u : 0u); }
  /// Representation index chosen for each requested segment, in order.
  const std::vector<std::size_t>& selections() const { return selections_; }
  const ClientConfig& config() const { return cfg_; }

 private:
  struct Outstanding {
    Segment seg;
    SimTime requested{};
    transport::StreamId stream = 0;
  };

  void maybe_request();
  void on_data(transport::StreamId stream, std::span<const std::uint8_t> bytes);
  void complete_segment();
  void sync_playback();

  engine::Simulator& sim_;
  transport::Connection& conn_;
  ClientConfig cfg_;
  FdashController fdash_;
  ThroughputEstimator estimator_;
  PlaybackState playback_;
  ResponseReader reader_;
  std::optional<Outstanding> outstanding_;
  std::uint32_t next_segment_ = 0;
  std::uint64_t body_bytes_ = 0;
  std::vector<std::size_t> selections_;
  std::optional<std::pair<SimTime, Duration>> last_decision_;  // time, buffer
  engine::Timer playback_timer_;
  engine::Timer request_timer_;
  FinishHandler on_finished_;
};

}  // namespace satdash::dash
