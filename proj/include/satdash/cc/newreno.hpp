// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "satdash/cc/congestion_controller.hpp"

namespace satdash::cc {

/// NewReno (RFC 5681 / RFC 6582) with byte counting. One window reduction per
/// recovery episode; recovery ends once a packet sent after its start is
/// acknowledged. No window growth while in recovery.
class NewReno final : public CongestionController {
 public:
  explicit NewReno(const CcParams& params);

  Algorithm algorithm() const override { return Algorithm::NewReno; }
  void on_ack(const AckEvent& ev) override;
  void on_loss(const LossEvent& ev) override;
  void on_timeout(const TimeoutEvent& ev) override;

  std::uint64_t cwnd_bytes() const override { return static_cast<std::uint64_t>(cwnd_); }
  std::uint64_t ssthresh_bytes() const override { return ssthresh_; }
  double pacing_rate_bps() const override;
  bool paces() const override { return params_.pace_loss_based; }
  std::string_view mode() const override;

  bool in_recovery() const { return in_recovery_; }
  PacketNumber recovery_start_pkt() const { return recovery_end_; }

 private:
  CcParams params_;
  double cwnd_;
  std::uint64_t ssthresh_;
  bool in_recovery_ = false;
  PacketNumber recovery_end_ = 0;
  Duration srtt_;
};

}  // namespace satdash::cc
