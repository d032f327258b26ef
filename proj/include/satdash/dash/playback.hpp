// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "satdash/dash/manifest.hpp"

namespace satdash::dash {

enum class PlaybackEventKind { Start, StallBegin, StallEnd, RepSwitch, SegmentDone, End };

std::string_view to_string(PlaybackEventKind k);

struct PlaybackEvent {
  SimTime t{};
  PlaybackEventKind kind = PlaybackEventKind::Start;
  Duration position{};  // media time played so far
  // RepSwitch and SegmentDone.
  std::int64_t segment = -1;
  std::int64_t rep = -1;
  double bitrate_bps = 0.0;
  std::uint64_t bytes = 0;
};

using PlaybackLog = std::vector<PlaybackEvent>;

/// `<t> <event> <detail>`, t in seconds.
std::string to_line(const PlaybackEvent& ev);
std::string format_log(const PlaybackLog& log);

struct PlaybackConfig {
  Duration content_duration = std::chrono::seconds(60);
  /// Buffered media needed to start, and to resume after a stall.
  Duration resume_threshold = std::chrono::seconds(4);
  std::uint64_t max_buffer_bytes = 512ull << 20;

  void validate() const;
};

struct StallInterval {
  SimTime begin{};
  std::optional<SimTime> end;
};

/// Client media buffer and playout clock. Time only moves forward through
/// advance_to(); arrivals and the final close also advance it first.
class PlaybackState {
 public:
  explicit PlaybackState(PlaybackConfig cfg = {}, SimTime session_start = {});

  /// Plays out buffered media up to `now`, opening a stall if the buffer runs
  /// dry before the end of the content.
  void advance_to(SimTime now);
  /// Appends a downloaded segment, then starts or resumes playback if enough
  /// media is buffered (or the rest of the content is).
  void add_segment(SimTime now, const Segment& seg);
  /// Ends the session: closes an open stall and logs `end`. Idempotent.
  void finish(SimTime now);

  /// Next time the state changes by itself (buffer empty or content done).
  std::optional<SimTime> next_transition() const;

  Duration buffer_level() const { return buffer_; }
  std::uint64_t buffered_bytes() const;
  Duration position() const { return position_; }
  Duration downloaded() const { return downloaded_; }
  bool playing() const { return playing_; }
  bool started() const { return started_; }
  bool content_done() const { return position_ >= cfg_.content_duration; }
  bool finished() const { return finished_; }
  SimTime now() const { return now_; }
  SimTime session_start() const { return session_start_; }
  std::optional<Representation> current_rep() const { return current_rep_; }
  const std::vector<StallInterval>& stalls() const { return stalls_; }
  const PlaybackLog& log() const { return log_; }
  const PlaybackConfig& config() const { return cfg_; }

 private:
  struct Buffered {
    Segment seg;
    Duration remaining;
  };

  void log_event(PlaybackEventKind kind);
  void begin_segment();
  bool can_start() const;

  PlaybackConfig cfg_;
  SimTime session_start_;
  SimTime now_;
  std::deque<Buffered> queue_;
  Duration buffer_{0};
  Duration position_{0};
  Duration downloaded_{0};
  bool playing_ = false;
  bool started_ = false;
  bool finished_ = false;
  std::optional<Representation> current_rep_;
  std::vector<StallInterval> stalls_;
  PlaybackLog log_;
};

/// Advances the playout clock by `dt`.
void playback_tick(PlaybackState& state, Duration dt);

}  // namespace satdash::dash
