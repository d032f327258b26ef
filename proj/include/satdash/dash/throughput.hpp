// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>

#include "satdash/engine/sim_time.hpp"

namespace satdash::dash {

/// Per-segment throughput samples smoothed with an EWMA. Download times are
/// measured on a fixed sampling grid: they are rounded up to a multiple of
/// `granularity` (never below one step).
class ThroughputEstimator {
 public:
  explicit ThroughputEstimator(engine::Duration granularity = std::chrono::milliseconds(50), double alpha = 0.3);

  /// Records one completed download and returns its sample in bit/s.
  double on_segment(std::uint64_t bytes, engine::Duration download_time);

  std::optional<double> estimate_bps() const { return estimate_; }
  std::optional<double> last_sample_bps() const { return last_; }
  std::size_t samples() const { return samples_; }
  engine::Duration granularity() const { return granularity_; }

 private:
  engine::Duration granularity_;
  double alpha_;
  std::optional<double> estimate_;
  std::optional<double> last_;
  std::size_t samples_ = 0;
};

}  // namespace satdash::dash
