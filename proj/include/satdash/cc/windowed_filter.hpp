// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <functional>
#include <utility>

namespace satdash::cc {

/// Exact sliding-window extremum. A sample taken at `t` stays in the window
/// while `now - t < window`. `Better(a, b)` is true when `a` should win over
/// `b`; std::greater gives a max filter, std::less a min filter.
template <class T, class Time, class Span, class Better>
class WindowedFilter {
 public:
  explicit WindowedFilter(Span window) : window_(window) {}

  void update(T value, Time now) {
    while (!samples_.empty() && !better_(samples_.back().second, value)) samples_.pop_back();
    samples_.emplace_back(now, value);
    expire(now);
  }

  void expire(Time now) {
    while (samples_.size() > 1 && !(now - samples_.front().first < window_)) samples_.pop_front();
  }

  bool empty() const { return samples_.empty(); }
  /// Caller must check empty() first.
  T best() const { return samples_.front().second; }
  T best_or(T fallback) const { return samples_.empty() ? fallback : samples_.front().second; }
  void reset() { samples_.clear(); }

 private:
  Span window_;
  Better better_{};
  std::deque<std::pair<Time, T>> samples_;
};

template <class T, class Time, class Span>
using MaxFilter = WindowedFilter<T, Time, Span, std::greater<T>>;
template <class T, class Time, class Span>
using MinFilter = WindowedFilter<T, Time, Span, std::less<T>>;

}  // namespace satdash::cc
