// SPDX-License-Identifier: Apache-2.0
#include "satdash/cc/cubic.hpp"

#include <algorithm>
#include <cmath>

namespace satdash::cc {

namespace {
// Reno-friendly additive increase, 3 (1 - beta) / (1 + beta) MSS per RTT.
constexpr double kAlphaCubic = 3.0 * (1.0 - Cubic::kBeta) / (1.0 + Cubic::kBeta);
}  // namespace

Cubic::Cubic(const CcParams& params)
    : params_(params),
      cwnd_(static_cast<double>(params.initial_cwnd_packets) * params.mss),
      ssthresh_(params.initial_ssthresh),
      srtt_(params.initial_rtt) {}

double Cubic::k_for(double w_max_bytes, double cwnd_epoch_bytes, double mss) {
  if (cwnd_epoch_bytes >= w_max_bytes) return 0.0;
  return std::cbrt((w_max_bytes - cwnd_epoch_bytes) / mss / kC);
}

double Cubic::window_at(double w_max_bytes, double k_s, double elapsed_s, double mss) {
  const double d = elapsed_s - k_s;
  return (kC * d * d * d) * mss + w_max_bytes;
}

double Cubic::cubic_window(SimTime t) const {
  if (!epoch_start_) return cwnd_;
  return window_at(w_max_, k_, engine::to_seconds(t - *epoch_start_), params_.mss);
}

void Cubic::start_epoch(SimTime now) {
  epoch_start_ = now;
  if (cwnd_ >= w_max_) w_max_ = cwnd_;
  k_ = k_for(w_max_, cwnd_, params_.mss);
  w_est_ = cwnd_;
}

void Cubic::on_ack(const AckEvent& ev) {
  if (ev.smoothed_rtt > Duration::zero()) srtt_ = ev.smoothed_rtt;
  if (in_recovery_ && ev.largest_acked > recovery_end_) in_recovery_ = false;
  if (in_recovery_) return;
  if (ev.app_limited) {
    // Idle time must not count as curve time.
    epoch_start_.reset();
    return;
  }

  const double mss = params_.mss;
  const auto acked = static_cast<double>(ev.acked_bytes);
  if (cwnd_ < static_cast<double>(ssthresh_)) {
    cwnd_ += acked;
    return;
  }

  if (!epoch_start_) start_epoch(ev.now);
  const double rtt_s = engine::to_seconds(srtt_);
  const double t = engine::to_seconds(ev.now - *epoch_start_);
  const double target = std::clamp(window_at(w_max_, k_, t + rtt_s, mss), cwnd_, 1.5 * cwnd_);

  w_est_ += kAlphaCubic * mss * acked / cwnd_;
  if (window_at(w_max_, k_, t, mss) < w_est_) {
    cwnd_ = std::max(cwnd_, w_est_);
  } else {
    cwnd_ += (target - cwnd_) / cwnd_ * acked;
  }
}

void Cubic::on_loss(const LossEvent& ev) {
  if (in_recovery_ && ev.largest_lost <= recovery_end_) return;
  in_recovery_ = true;
  recovery_end_ = ev.largest_sent;

  const double mss = params_.mss;
  // Fast convergence: release bandwidth sooner when W_max is shrinking.
  w_max_ = cwnd_ < w_max_ ? cwnd_ * (1.0 + kBeta) / 2.0 : cwnd_;
  cwnd_ = std::max(cwnd_ * kBeta, 2.0 * mss);
  ssthresh_ = static_cast<std::uint64_t>(cwnd_);
  epoch_start_ = ev.now;
  k_ = k_for(w_max_, cwnd_, mss);
  w_est_ = cwnd_;
}

void Cubic::on_timeout(const TimeoutEvent& ev) {
  const double mss = params_.mss;
  w_max_ = cwnd_;
  ssthresh_ = static_cast<std::uint64_t>(std::max(cwnd_ * kBeta, 2.0 * mss));
  cwnd_ = mss;
  epoch_start_.reset();
  in_recovery_ = false;
  recovery_end_ = ev.largest_sent;
}

double Cubic::pacing_rate_bps() const {
  const double gain = cwnd_ < static_cast<double>(ssthresh_) ? 2.0 : 1.2;
  return gain * cwnd_ * 8.0 / engine::to_seconds(srtt_);
}

std::string_view Cubic::mode() const {
  if (in_recovery_) return "Recovery";
  return cwnd_ < static_cast<double>(ssthresh_) ? "SlowStart" : "CongestionAvoidance";
}

}  // namespace satdash::cc
