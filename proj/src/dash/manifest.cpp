// SPDX-License-Identifier: Apache-2.0
#include "satdash/dash/manifest.hpp"

#include <cmath>
#include <string>

namespace satdash::dash {

Ladder::Ladder(std::vector<double> bitrates_bps) : bitrates_(std::move(bitrates_bps)) {
  if (bitrates_.size() < 2) throw std::invalid_argument("ladder needs at least two representations");
  for (std::size_t i = 0; i < bitrates_.size(); ++i) {
    if (!(bitrates_[i] > 0.0) || !std::isfinite(bitrates_[i]))
      throw std::invalid_argument("ladder bitrates must be positive");
    if (i > 0 && !(bitrates_[i] > bitrates_[i - 1]))
      throw std::invalid_argument("ladder bitrates must be strictly increasing");
  }
}

Ladder Ladder::default_ladder() { return Ladder({400e3, 750e3, 1.2e6, 1.85e6, 2.85e6, 4.3e6}); }

std::uint64_t segment_size_bytes(double bitrate_bps, Duration duration) {
  return static_cast<std::uint64_t>(std::llround(bitrate_bps * engine::to_seconds(duration) / 8.0));
}

void Manifest::validate() const {
  if (segment_duration <= Duration::zero()) throw std::invalid_argument("segment duration must be positive");
  if (content_duration <= Duration::zero()) throw std::invalid_argument("content duration must be positive");
}

std::uint32_t Manifest::segment_count() const {
  return static_cast<std::uint32_t>((content_duration.count() + segment_duration.count() - 1) / segment_duration.count());
}

Segment Manifest::segment(std::uint32_t index, std::size_t rep) const {
  if (index >= segment_count())
    throw UnknownSegment("segment " + std::to_string(index) + " is past the end of the content");
  if (rep >= ladder.size()) throw UnknownSegment("representation " + std::to_string(rep) + " does not exist");
  Segment s;
  s.index = index;
  s.duration = std::min(segment_duration, content_duration - index * segment_duration);
  s.rep = ladder.at(rep);
  s.size_bytes = segment_size_bytes(s.rep.bitrate_bps, s.duration);
  return s;
}

}  // namespace satdash::dash
