// SPDX-License-Identifier: Apache-2.0
#include "satdash/dash/playback.hpp"

#include <cstdio>
#include <stdexcept>

namespace satdash::dash {

std::string_view to_string(PlaybackEventKind k) {
  switch (k) {
    case PlaybackEventKind::Start: return "start";
    case PlaybackEventKind::StallBegin: return "stall_begin";
    case PlaybackEventKind::StallEnd: return "stall_end";
    case PlaybackEventKind::RepSwitch: return "rep_switch";
    case PlaybackEventKind::SegmentDone: return "segment_done";
    case PlaybackEventKind::End: return "end";
  }
  return "?";
}

std::string to_line(const PlaybackEvent& ev) {
  char buf[160];
  const double t = engine::to_seconds(ev.t);
  const auto kind = to_string(ev.kind);
  switch (ev.kind) {
    case PlaybackEventKind::RepSwitch:
      std::snprintf(buf, sizeof buf, "%.6f %.*s seg=%lld rep=%lld bitrate=%.0f", t, static_cast<int>(kind.size()),
                    kind.data(), static_cast<long long>(ev.segment), static_cast<long long>(ev.rep), ev.bitrate_bps);
      break;
    case PlaybackEventKind::SegmentDone:
      std::snprintf(buf, sizeof buf, "%.6f %.*s seg=%lld rep=%lld bytes=%llu", t, static_cast<int>(kind.size()),
                    kind.data(), static_cast<long long>(ev.segment), static_cast<long long>(ev.rep),
                    static_cast<unsigned long long>(ev.bytes));
      break;
    default:
      std::snprintf(buf, sizeof buf, "%.6f %.*s pos=%.6f", t, static_cast<int>(kind.size()), kind.data(),
                    engine::to_seconds(ev.position));
  }
  return buf;
}

std::string format_log(const PlaybackLog& log) {
  std::string out;
  for (const auto& ev : log) {
    out += to_line(ev);
    out += '\n';
  }
  return out;
}

void PlaybackConfig::validate() const {
  if (content_duration <= Duration::zero()) throw std::invalid_argument("playback: content duration must be positive");
  if (resume_threshold <= Duration::zero()) throw std::invalid_argument("playback: resume threshold must be positive");
  if (max_buffer_bytes == 0) throw std::invalid_argument("playback: buffer size must be positive");
}

PlaybackState::PlaybackState(PlaybackConfig cfg, SimTime session_start)
    : cfg_(cfg), session_start_(session_start), now_(session_start) {
  cfg_.validate();
}

void PlaybackState::log_event(PlaybackEventKind kind) {
  PlaybackEvent ev;
  ev.t = now_;
  ev.kind = kind;
  ev.position = position_;
  log_.push_back(ev);
}

void PlaybackState::begin_segment() {
  const Segment& seg = queue_.front().seg;
  if (current_rep_ && current_rep_->index == seg.rep.index) return;
  current_rep_ = seg.rep;
  PlaybackEvent ev;
  ev.t = now_;
  ev.kind = PlaybackEventKind::RepSwitch;
  ev.position = position_;
  ev.segment = seg.index;
  ev.rep = static_cast<std::int64_t>(seg.rep.index);
  ev.bitrate_bps = seg.rep.bitrate_bps;
  log_.push_back(ev);
}

bool PlaybackState::can_start() const {
  return buffer_ >= cfg_.resume_threshold || (buffer_ > Duration::zero() && downloaded_ >= cfg_.content_duration);
}

void PlaybackState::advance_to(SimTime now) {
  if (now < now_) throw std::logic_error("PlaybackState: time moved backwards");
  if (finished_) {
    now_ = now;
    return;
  }
  while (playing_ && now_ < now) {
    Buffered& front = queue_.front();
    const Duration step = std::min(front.remaining, now - now_);
    front.remaining -= step;
    buffer_ -= step;
    position_ += step;
    now_ += step;
    if (front.remaining > Duration::zero()) continue;
    queue_.pop_front();
    if (!queue_.empty()) {
      begin_segment();
      continue;
    }
    playing_ = false;
    if (!content_done()) {
      stalls_.push_back({now_, std::nullopt});
      log_event(PlaybackEventKind::StallBegin);
    }
  }
  now_ = now;
}

void PlaybackState::add_segment(SimTime now, const Segment& seg) {
  advance_to(now);
  if (finished_) return;
  queue_.push_back({seg, seg.duration});
  buffer_ += seg.duration;
  downloaded_ += seg.duration;
  PlaybackEvent ev;
  ev.t = now_;
  ev.kind = PlaybackEventKind::SegmentDone;
  ev.position = position_;
  ev.segment = seg.index;
  ev.rep = static_cast<std::int64_t>(seg.rep.index);
  ev.bitrate_bps = seg.rep.bitrate_bps;
  ev.bytes = seg.size_bytes;
  log_.push_back(ev);

  if (playing_ || !can_start()) return;
  playing_ = true;
  if (!started_) {
    started_ = true;
    log_event(PlaybackEventKind::Start);
  } else {
    stalls_.back().end = now_;
    log_event(PlaybackEventKind::StallEnd);
  }
  begin_segment();
}

void PlaybackState::finish(SimTime now) {
  if (finished_) return;
  advance_to(now);
  if (!stalls_.empty() && !stalls_.back().end) stalls_.back().end = now_;
  playing_ = false;
  finished_ = true;
  log_event(PlaybackEventKind::End);
}

std::optional<SimTime> PlaybackState::next_transition() const {
  if (!playing_ || finished_) return std::nullopt;
  return now_ + buffer_;
}

std::uint64_t PlaybackState::buffered_bytes() const {
  std::uint64_t total = 0;
  for (const auto& b : queue_) {
    total += static_cast<std::uint64_t>(static_cast<long double>(b.seg.size_bytes) * b.remaining.count() /
                                        b.seg.duration.count());
  }
  return total;
}

void playback_tick(PlaybackState& state, Duration dt) {
  if (dt <= Duration::zero()) throw std::invalid_argument("playback_tick: dt must be positive");
  state.advance_to(state.now() + dt);
}

}  // namespace satdash::dash
