// SPDX-License-Identifier: Apache-2.0
#include "satdash/metrics/session.hpp"

#include <numeric>

#include "satdash/metrics/aggregate.hpp"

namespace satdash::metrics {

using dash::PlaybackEventKind;

SessionMetrics compute_session(const dash::PlaybackLog& log, std::span<const transport::TransportEvent> trace,
                               SimTime session_start, Duration latency_warmup) {
  SessionMetrics m;
  for (const auto& ev : trace) {
    if (ev.kind == transport::TraceKind::RttSample) {
      if (ev.t < session_start + latency_warmup) continue;
      m.latency_samples_ms.push_back(engine::to_millis(ev.rtt) / 2.0);
    } else if (ev.kind == transport::TraceKind::Delivered) {
      m.app_bytes += ev.bytes;
    }
  }
  if (!m.latency_samples_ms.empty()) {
    m.latency_median_ms = median(m.latency_samples_ms);
    m.latency_mean_ms = mean(m.latency_samples_ms);
  }

  if (log.empty()) {
    m.stall_count = 1;
    return m;
  }

  bool playing = false;
  SimTime since{};
  std::optional<SimTime> stall_open;
  double bitrate = 0.0;
  double bit_seconds = 0.0;
  auto play_until = [&](SimTime t) {
    if (playing) bit_seconds += bitrate * engine::to_seconds(t - since);
    since = t;
  };

  SimTime end = log.back().t;
  Duration position = log.back().position;
  for (const auto& ev : log) {
    switch (ev.kind) {
      case PlaybackEventKind::Start:
        m.started = true;
        m.startup = ev.t - session_start;
        playing = true;
        since = ev.t;
        break;
      case PlaybackEventKind::RepSwitch:
        play_until(ev.t);
        bitrate = ev.bitrate_bps;
        break;
      case PlaybackEventKind::StallBegin:
        play_until(ev.t);
        playing = false;
        stall_open = ev.t;
        ++m.stall_count;
        break;
      case PlaybackEventKind::StallEnd:
        if (stall_open) m.interruption += ev.t - *stall_open;
        stall_open.reset();
        playing = true;
        since = ev.t;
        break;
      case PlaybackEventKind::SegmentDone:
        break;
      case PlaybackEventKind::End:
        end = ev.t;
        position = ev.position;
        break;
    }
    if (ev.kind == PlaybackEventKind::End) break;
  }
  play_until(end);
  if (stall_open) m.interruption += end - *stall_open;

  m.elapsed = end - session_start;
  m.playback = position;
  if (!m.started) {
    m.interruption = m.elapsed;
    m.stall_count = 1;
  }
  m.residual = m.elapsed - m.playback - m.interruption - m.startup;

  const double elapsed_s = engine::to_seconds(m.elapsed);
  m.mean_throughput_bps = elapsed_s > 0.0 ? static_cast<double>(m.app_bytes) * 8.0 / elapsed_s : 0.0;
  const double played_s = engine::to_seconds(m.playback);
  m.avg_playback_bitrate_bps = played_s > 0.0 ? bit_seconds / played_s : 0.0;
  return m;
}

}  // namespace satdash::metrics
