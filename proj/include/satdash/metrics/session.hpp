// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "satdash/dash/playback.hpp"
#include "satdash/transport/trace.hpp"

namespace satdash::metrics {

using engine::Duration;
using engine::SimTime;

/// Per-user results of one run.
///
/// Time accounting: playback + interruption + startup + residual = elapsed,
/// computed exactly in simulation ticks. Startup is the delay before the
/// first frame and is not part of interruption. A session that never starts
/// is one open-ended interruption covering the whole session.
struct SessionMetrics {
  Duration elapsed{0};
  Duration playback{0};
  Duration interruption{0};
  Duration startup{0};
  Duration residual{0};
  std::uint32_t stall_count = 0;
  bool started = false;

  std::vector<double> latency_samples_ms;  // RTT / 2 per sample
  std::optional<double> latency_median_ms;
  std::optional<double> latency_mean_ms;

  std::uint64_t app_bytes = 0;
  double mean_throughput_bps = 0.0;       // app bytes * 8 / elapsed
  double avg_playback_bitrate_bps = 0.0;  // time-weighted over played media

  double playback_s() const { return engine::to_seconds(playback); }
  double interruption_s() const { return engine::to_seconds(interruption); }
  double startup_s() const { return engine::to_seconds(startup); }
  double elapsed_s() const { return engine::to_seconds(elapsed); }
};

/// Derives session metrics from a playback log and a transport trace.
/// RttSample events provide latency samples; Delivered events count
/// application bytes. Elapsed time runs from `session_start` to the log's
/// `end` event (or its last event if it has none). RTT samples taken before
/// `session_start + latency_warmup` are ignored.
SessionMetrics compute_session(const dash::PlaybackLog& log, std::span<const transport::TransportEvent> trace,
                               SimTime session_start = engine::kTimeZero, Duration latency_warmup = Duration::zero());

}  // namespace satdash::metrics
