// SPDX-License-Identifier: Apache-2.0
#include "satdash/cc/newreno.hpp"

#include <algorithm>

namespace satdash::cc {

NewReno::NewReno(const CcParams& params)
    : params_(params),
      cwnd_(static_cast<double>(params.initial_cwnd_packets) * params.mss),
      ssthresh_(params.initial_ssthresh),
      srtt_(params.initial_rtt) {}

void NewReno::on_ack(const AckEvent& ev) {
  if (ev.smoothed_rtt > Duration::zero()) srtt_ = ev.smoothed_rtt;
  if (in_recovery_ && ev.largest_acked > recovery_end_) in_recovery_ = false;
  if (in_recovery_ || ev.app_limited) return;

  const double mss = params_.mss;
  if (cwnd_ < static_cast<double>(ssthresh_)) {
    cwnd_ += static_cast<double>(ev.acked_bytes);
  } else {
    cwnd_ += mss * static_cast<double>(ev.acked_bytes) / cwnd_;
  }
}

void NewReno::on_loss(const LossEvent& ev) {
  if (in_recovery_ && ev.largest_lost <= recovery_end_) return;
  in_recovery_ = true;
  recovery_end_ = ev.largest_sent;
  const auto floor = 2 * std::uint64_t{params_.mss};
  ssthresh_ = std::max(cwnd_bytes() / 2, floor);
  cwnd_ = static_cast<double>(ssthresh_);
}

void NewReno::on_timeout(const TimeoutEvent& ev) {
  const auto floor = 2 * std::uint64_t{params_.mss};
  ssthresh_ = std::max(cwnd_bytes() / 2, floor);
  cwnd_ = params_.mss;
  in_recovery_ = false;
  recovery_end_ = ev.largest_sent;
}

double NewReno::pacing_rate_bps() const {
  const double gain = cwnd_ < static_cast<double>(ssthresh_) ? 2.0 : 1.2;
  return gain * cwnd_ * 8.0 / engine::to_seconds(srtt_);
}

std::string_view NewReno::mode() const {
  if (in_recovery_) return "Recovery";
  return cwnd_ < static_cast<double>(ssthresh_) ? "SlowStart" : "CongestionAvoidance";
}

}  // namespace satdash::cc
