// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <optional>

#include "satdash/engine/sim_time.hpp"

namespace satdash::transport {

using engine::Duration;

/// Smoothed RTT per RFC 6298. Before the first sample srtt is the configured
/// initial RTT and rttvar half of it.
class RttEstimator {
 public:
  explicit RttEstimator(Duration initial_rtt) : srtt_(initial_rtt), rttvar_(initial_rtt / 2) {}

  void on_sample(Duration rtt) {
    if (rtt < Duration::zero()) rtt = Duration::zero();
    latest_ = rtt;
    if (!min_rtt_ || rtt < *min_rtt_) min_rtt_ = rtt;
    if (!has_sample_) {
      srtt_ = rtt;
      rttvar_ = rtt / 2;
      has_sample_ = true;
      return;
    }
    const Duration err = srtt_ > rtt ? srtt_ - rtt : rtt - srtt_;
    rttvar_ = (3 * rttvar_ + err) / 4;
    srtt_ = (7 * srtt_ + rtt) / 8;
  }

  bool has_sample() const { return has_sample_; }
  Duration srtt() const { return srtt_; }
  Duration rttvar() const { return rttvar_; }
  std::optional<Duration> latest() const { return has_sample_ ? std::optional(latest_) : std::nullopt; }
  std::optional<Duration> min_rtt() const { return min_rtt_; }

  /// max(srtt + 4 rttvar, min_rto)
  Duration rto(Duration min_rto) const { return std::max(srtt_ + 4 * rttvar_, min_rto); }

 private:
  Duration srtt_;
  Duration rttvar_;
  Duration latest_{0};
  std::optional<Duration> min_rtt_;
  bool has_sample_ = false;
};

}  // namespace satdash::transport
