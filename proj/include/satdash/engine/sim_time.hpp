// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

namespace satdash::engine {

/// Virtual clock of the simulator. Ticks are integer nanoseconds since the
/// start of a run, so equal inputs give equal timestamps on every platform.
struct SimClock {
  using rep = std::int64_t;
  using period = std::nano;
  using duration = std::chrono::duration<rep, period>;
  using time_point = std::chrono::time_point<SimClock>;
  static constexpr bool is_steady = true;
};

using Duration = SimClock::duration;
using SimTime = SimClock::time_point;

inline constexpr SimTime kTimeZero{Duration{0}};

constexpr double to_seconds(Duration d) { return static_cast<double>(d.count()) * 1e-9; }
constexpr double to_seconds(SimTime t) { return to_seconds(t.time_since_epoch()); }
constexpr double to_millis(Duration d) { return static_cast<double>(d.count()) * 1e-6; }

/// Rounds to the nearest nanosecond.
inline Duration from_seconds(double s) { return Duration{std::llround(s * 1e9)}; }
inline Duration from_millis(double ms) { return Duration{std::llround(ms * 1e6)}; }

constexpr SimTime at(Duration since_start) { return SimTime{since_start}; }

}  // namespace satdash::engine
