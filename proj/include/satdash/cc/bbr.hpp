// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <numbers>
#include <optional>

#include "satdash/cc/congestion_controller.hpp"
#include "satdash/cc/windowed_filter.hpp"

namespace satdash::cc {

/// BBR version 1: a model of bottleneck bandwidth (windowed max of delivery
/// rate over 10 round trips) and round-trip propagation time (minimum RTT,
/// refreshed every 10 s) that sets the pacing rate and caps data in flight.
///
/// State machine: Startup -> Drain -> ProbeBW, with ProbeRTT entered from any
/// state when the min-RTT estimate has not been refreshed for 10 s.
class Bbr final : public CongestionController {
 public:
  enum class Mode { Startup, Drain, ProbeBw, ProbeRtt };

  static constexpr double kHighGain = 2.0 / std::numbers::ln2;
  static constexpr double kCwndGain = 2.0;
  static constexpr std::array<double, 8> kPacingGainCycle = {1.25, 0.75, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  static constexpr std::uint64_t kBtlBwFilterRounds = 10;
  static constexpr Duration kRtpropFilterLen = std::chrono::seconds(10);
  static constexpr Duration kProbeRttDuration = std::chrono::milliseconds(200);
  static constexpr std::uint32_t kMinPipeCwndPackets = 4;
  static constexpr double kFullBwThresh = 1.25;
  static constexpr int kFullBwCount = 3;

  Bbr(const CcParams& params, engine::SeededRng rng);

  Algorithm algorithm() const override { return Algorithm::Bbr; }
  void on_packet_sent(SimTime now, std::uint64_t bytes, std::uint64_t prior_in_flight) override;
  void on_ack(const AckEvent& ev) override;
  void on_loss(const LossEvent& ev) override;
  void on_timeout(const TimeoutEvent& ev) override;

  std::uint64_t cwnd_bytes() const override { return cwnd_; }
  double pacing_rate_bps() const override { return pacing_rate_; }
  bool paces() const override { return true; }
  std::string_view mode() const override;

  Mode state() const { return mode_; }
  double btl_bw_bps() const { return btl_bw_.best_or(0.0); }
  /// Nullopt until the first RTT sample.
  std::optional<Duration> min_rtt() const { return rtprop_; }
  double pacing_gain() const { return pacing_gain_; }
  double cwnd_gain() const { return cwnd_gain_; }
  std::uint64_t round_count() const { return round_count_; }
  bool filled_pipe() const { return filled_pipe_; }
  int full_bw_count() const { return full_bw_count_; }
  std::size_t cycle_index() const { return cycle_index_; }

  /// Data in flight that `gain` times the estimated BDP allows, in bytes.
  std::uint64_t inflight_for(double gain) const;

 private:
  void update_round(const AckEvent& ev);
  void update_btl_bw(const AckEvent& ev);
  void check_cycle_phase(const AckEvent& ev);
  void check_full_pipe(const AckEvent& ev);
  void check_drain(const AckEvent& ev);
  void update_rtprop(const AckEvent& ev);
  void check_probe_rtt(const AckEvent& ev);
  void set_pacing_rate_with_gain(double gain);
  void set_cwnd(const AckEvent& ev);

  void enter_startup();
  void enter_drain();
  void enter_probe_bw(SimTime now);
  void advance_cycle_phase(SimTime now);
  void save_cwnd();
  void restore_cwnd();
  std::uint64_t min_pipe_cwnd() const { return std::uint64_t{kMinPipeCwndPackets} * params_.mss; }

  CcParams params_;
  engine::SeededRng rng_;
  Mode mode_ = Mode::Startup;

  MaxFilter<double, std::uint64_t, std::uint64_t> btl_bw_{kBtlBwFilterRounds};
  std::optional<Duration> rtprop_;
  SimTime rtprop_stamp_{};
  bool rtprop_expired_ = false;

  double pacing_rate_ = 0.0;
  double pacing_gain_ = kHighGain;
  double cwnd_gain_ = kHighGain;
  std::uint64_t cwnd_;
  std::uint64_t prior_cwnd_ = 0;

  std::uint64_t round_count_ = 0;
  std::uint64_t next_round_delivered_ = 0;
  bool round_start_ = false;

  bool filled_pipe_ = false;
  double full_bw_ = 0.0;
  int full_bw_count_ = 0;

  std::size_t cycle_index_ = 0;
  SimTime cycle_stamp_{};

  std::optional<SimTime> probe_rtt_done_stamp_;
  bool probe_rtt_round_done_ = false;
  bool idle_restart_ = false;

  bool in_recovery_ = false;
  bool packet_conservation_ = false;
  PacketNumber recovery_end_ = 0;
  std::uint64_t conservation_round_ = 0;
};

}  // namespace satdash::cc
