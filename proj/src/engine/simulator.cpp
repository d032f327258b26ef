// SPDX-License-Identifier: Apache-2.0
#include "satdash/engine/simulator.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace satdash::engine {

EventHandle Simulator::schedule(SimTime fire_at, Action action) {
  if (fire_at < now_) {
    throw std::logic_error("Simulator::schedule: event at " + std::to_string(fire_at.time_since_epoch().count()) +
                           " ns is before now (" + std::to_string(now_.time_since_epoch().count()) + " ns)");
  }
  const std::uint64_t seq = next_sequence_++;
  heap_.push_back(Event{fire_at, seq, std::move(action)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  live_.insert(seq);
  return EventHandle{seq};
}

void Simulator::cancel(EventHandle handle) {
  if (handle) live_.erase(handle.id);
}

SimTime Simulator::run_until(SimTime end) {
  if (running_) throw std::logic_error("Simulator::run_until: already running");
  running_ = true;
  stop_requested_ = false;
  while (!heap_.empty() && !stop_requested_) {
    if (heap_.front().fire_at > end) break;
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event ev = std::move(heap_.back());
    heap_.pop_back();
    if (live_.erase(ev.sequence) == 0) continue;  // cancelled
    now_ = ev.fire_at;
    ++executed_;
    ev.action();
  }
  if (!stop_requested_ && end > now_) now_ = end;
  running_ = false;
  return now_;
}

void Timer::arm(SimTime deadline) {
  if (deadline < sim_.now()) deadline = sim_.now();
  deadline_ = deadline;
  armed_ = true;
  // A pending event at or before the deadline will re-arm itself on firing.
  if (event_ && event_time_ <= deadline && event_time_ >= sim_.now()) return;
  sim_.cancel(event_);
  event_time_ = deadline;
  event_ = sim_.schedule(deadline, [this] { fire(); });
}

void Timer::fire() {
  event_ = EventHandle{};
  if (!armed_) return;
  if (sim_.now() < deadline_) {
    event_time_ = deadline_;
    event_ = sim_.schedule(deadline_, [this] { fire(); });
    return;
  }
  armed_ = false;
  on_fire_();
}

}  // namespace satdash::engine
