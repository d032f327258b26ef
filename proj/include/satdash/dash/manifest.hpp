// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "satdash/engine/sim_time.hpp"

namespace satdash::dash {

using engine::Duration;
using engine::SimTime;

struct Representation {
  std::size_t index = 0;
  double bitrate_bps = 0.0;
};

/// Bitrate ladder, strictly increasing, at least two rungs.
class Ladder {
 public:
  explicit Ladder(std::vector<double> bitrates_bps);

  static Ladder default_ladder();

  std::size_t size() const { return bitrates_.size(); }
  Representation at(std::size_t i) const { return {i, bitrates_.at(i)}; }
  Representation lowest() const { return at(0); }
  Representation highest() const { return at(size() - 1); }
  const std::vector<double>& bitrates() const { return bitrates_; }

 private:
  std::vector<double> bitrates_;
};

class UnknownSegment : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Constant-bitrate segment.
struct Segment {
  std::uint32_t index = 0;
  Duration duration{};
  Representation rep;
  std::uint64_t size_bytes = 0;
};

std::uint64_t segment_size_bytes(double bitrate_bps, Duration duration);

struct Manifest {
  Ladder ladder = Ladder::default_ladder();
  Duration segment_duration = std::chrono::seconds(2);
  Duration content_duration = std::chrono::seconds(60);

  void validate() const;
  std::uint32_t segment_count() const;
  /// Throws UnknownSegment for an index past the content or a rung that does
  /// not exist. The final segment may be shorter than the others.
  Segment segment(std::uint32_t index, std::size_t rep) const;
};

}  // namespace satdash::dash
