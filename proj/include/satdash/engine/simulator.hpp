// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

#include "satdash/engine/sim_time.hpp"

namespace satdash::engine {

/// Opaque handle returned by Simulator::schedule. Zero is never issued.
struct EventHandle {
  std::uint64_t id = 0;
  explicit operator bool() const { return id != 0; }
};

/// Single-threaded discrete-event scheduler.
///
/// Events at equal times run in the order they were scheduled. Scheduling
/// into the past throws std::logic_error: it always indicates a model bug.
class Simulator {
 public:
  using Action = std::function<void()>;

  Simulator() = default;
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  SimTime now() const { return now_; }

  EventHandle schedule(SimTime fire_at, Action action);
  EventHandle schedule_in(Duration delay, Action action) { return schedule(now_ + delay, std::move(action)); }

  /// Cancelling an event that already fired (or an empty handle) is a no-op.
  void cancel(EventHandle handle);

  /// Executes every event with fire_at <= end in order, then leaves the clock
  /// at `end`. Returns the final clock value.
  SimTime run_until(SimTime end);

  /// Stops run_until after the currently executing event.
  void stop() { stop_requested_ = true; }

  std::size_t pending() const { return live_.size(); }
  std::uint64_t executed() const { return executed_; }

 private:
  struct Event {
    SimTime fire_at;
    std::uint64_t sequence;
    Action action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.sequence > b.sequence;
    }
  };

  SimTime now_ = kTimeZero;
  std::uint64_t next_sequence_ = 1;
  std::uint64_t executed_ = 0;
  bool running_ = false;
  bool stop_requested_ = false;
  std::vector<Event> heap_;
  std::unordered_set<std::uint64_t> live_;
};

/// Re-armable one-shot timer on top of Simulator.
///
/// Moving a deadline later does not touch the event queue; the pending event
/// re-arms itself when it fires early. Not movable: events capture `this`.
class Timer {
 public:
  Timer(Simulator& sim, std::function<void()> on_fire) : sim_(sim), on_fire_(std::move(on_fire)) {}
  Timer(const Timer&) = delete;
  Timer& operator=(const Timer&) = delete;
  ~Timer() { sim_.cancel(event_); }

  void arm(SimTime deadline);
  void arm_in(Duration delay) { arm(sim_.now() + delay); }
  void cancel() { armed_ = false; }
  bool armed() const { return armed_; }
  SimTime deadline() const { return deadline_; }

 private:
  void fire();

  Simulator& sim_;
  std::function<void()> on_fire_;
  bool armed_ = false;
  SimTime deadline_ = kTimeZero;
  EventHandle event_;
  SimTime event_time_ = kTimeZero;
};

}  // namespace satdash::engine
