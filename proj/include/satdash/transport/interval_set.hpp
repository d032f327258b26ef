// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>

namespace satdash::transport {

/// Set of disjoint half-open ranges [begin, end), merged on insert.
class IntervalSet {
 public:
  using Map = std::map<std::uint64_t, std::uint64_t>;  // begin -> end

  /// Returns the number of values newly covered.
  std::uint64_t insert(std::uint64_t begin, std::uint64_t end) {
    if (begin >= end) return 0;
    std::uint64_t added = end - begin;
    auto it = ranges_.upper_bound(begin);
    if (it != ranges_.begin()) {
      auto prev = std::prev(it);
      if (prev->second >= begin) {
        if (prev->second >= end) return 0;
        added -= prev->second - begin;
        begin = prev->first;
        it = ranges_.erase(prev);
      }
    }
    while (it != ranges_.end() && it->first <= end) {
      const std::uint64_t ov_end = std::min(it->second, end);
      added -= ov_end - it->first;
      end = std::max(end, it->second);
      it = ranges_.erase(it);
    }
    ranges_.emplace(begin, end);
    return added;
  }

  bool contains(std::uint64_t v) const {
    auto it = ranges_.upper_bound(v);
    if (it == ranges_.begin()) return false;
    return std::prev(it)->second > v;
  }

  /// True if all of [begin, end) is covered.
  bool covers(std::uint64_t begin, std::uint64_t end) const {
    if (begin >= end) return true;
    auto it = ranges_.upper_bound(begin);
    if (it == ranges_.begin()) return false;
    return std::prev(it)->second >= end;
  }

  /// End of the range starting at or covering `from`, or `from` if uncovered.
  std::uint64_t contiguous_end(std::uint64_t from) const {
    auto it = ranges_.upper_bound(from);
    if (it == ranges_.begin()) return from;
    auto prev = std::prev(it);
    return prev->second > from ? prev->second : from;
  }

  /// Drops everything below `v`.
  void erase_below(std::uint64_t v) {
    while (!ranges_.empty() && ranges_.begin()->first < v) {
      auto node = ranges_.begin();
      const std::uint64_t e = node->second;
      ranges_.erase(node);
      if (e > v) {
        ranges_.emplace(v, e);
        break;
      }
    }
  }

  bool empty() const { return ranges_.empty(); }
  std::size_t size() const { return ranges_.size(); }
  const Map& ranges() const { return ranges_; }
  /// Largest covered value; set must be non-empty.
  std::uint64_t max() const { return std::prev(ranges_.end())->second - 1; }

 private:
  Map ranges_;
};

}  // namespace satdash::transport
