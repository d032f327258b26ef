// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "satdash/cc/congestion_controller.hpp"

namespace satdash::cc {

/// CUBIC window growth, W(t) = C (t - K)^3 + W_max with W in MSS and t in
/// seconds since the epoch start, plus the Reno-friendly estimate and fast
/// convergence. Slow start and recovery bookkeeping match NewReno.
class Cubic final : public CongestionController {
 public:
  static constexpr double kC = 0.4;
  static constexpr double kBeta = 0.7;

  explicit Cubic(const CcParams& params);

  Algorithm algorithm() const override { return Algorithm::Cubic; }
  void on_ack(const AckEvent& ev) override;
  void on_loss(const LossEvent& ev) override;
  void on_timeout(const TimeoutEvent& ev) override;

  std::uint64_t cwnd_bytes() const override { return static_cast<std::uint64_t>(cwnd_); }
  std::uint64_t ssthresh_bytes() const override { return ssthresh_; }
  double pacing_rate_bps() const override;
  bool paces() const override { return params_.pace_loss_based; }
  std::string_view mode() const override;

  /// Cubic target at time t in bytes. Without an epoch this is the current cwnd.
  double cubic_window(SimTime t) const;

  /// K in seconds for a window that must climb from `cwnd_epoch` to `w_max`.
  static double k_for(double w_max_bytes, double cwnd_epoch_bytes, double mss);
  /// W(t) in bytes for elapsed seconds since the epoch start.
  static double window_at(double w_max_bytes, double k_s, double elapsed_s, double mss);

  double w_max_bytes() const { return w_max_; }
  double k_seconds() const { return k_; }
  std::optional<SimTime> epoch_start() const { return epoch_start_; }
  bool in_recovery() const { return in_recovery_; }

 private:
  void start_epoch(SimTime now);

  CcParams params_;
  double cwnd_;
  std::uint64_t ssthresh_;
  double w_max_ = 0.0;
  double k_ = 0.0;
  double w_est_ = 0.0;
  std::optional<SimTime> epoch_start_;
  bool in_recovery_ = false;
  PacketNumber recovery_end_ = 0;
  Duration srtt_;
};

}  // namespace satdash::cc
