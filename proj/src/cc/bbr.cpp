// SPDX-License-Identifier: Apache-2.0
#include "satdash/cc/bbr.hpp"

#include <algorithm>

namespace satdash::cc {

Bbr::Bbr(const CcParams& params, engine::SeededRng rng)
    : params_(params), rng_(rng), cwnd_(std::uint64_t{params.initial_cwnd_packets} * params.mss) {
  const double initial_bytes = static_cast<double>(cwnd_);
  pacing_rate_ = kHighGain * initial_bytes * 8.0 / engine::to_seconds(params.initial_rtt);
  enter_startup();
}

std::string_view Bbr::mode() const {
  switch (mode_) {
    case Mode::Startup: return "Startup";
    case Mode::Drain: return "Drain";
    case Mode::ProbeBw: return "ProbeBW";
    case Mode::ProbeRtt: return "ProbeRTT";
  }
  return "?";
}

std::uint64_t Bbr::inflight_for(double gain) const {
  const double bw = btl_bw_bps();
  if (!rtprop_ || bw <= 0.0) return std::uint64_t{params_.initial_cwnd_packets} * params_.mss;
  const double bdp = bw / 8.0 * engine::to_seconds(*rtprop_);
  std::uint64_t quantum = params_.mss;
  if (pacing_rate_ >= 1.2e6) quantum = 2 * std::uint64_t{params_.mss};
  return static_cast<std::uint64_t>(gain * bdp) + 3 * quantum;
}

void Bbr::on_packet_sent(SimTime /*now*/, std::uint64_t /*bytes*/, std::uint64_t prior_in_flight) {
  if (prior_in_flight == 0) {
    // Restarting from idle: resume at the estimated rate rather than a probe gain.
    idle_restart_ = true;
    if (mode_ == Mode::ProbeBw) set_pacing_rate_with_gain(1.0);
  }
}

void Bbr::on_ack(const AckEvent& ev) {
  if (in_recovery_ && ev.largest_acked > recovery_end_) {
    in_recovery_ = false;
    packet_conservation_ = false;
    restore_cwnd();
  }
  update_round(ev);
  if (packet_conservation_ && round_start_ && round_count_ > conservation_round_) packet_conservation_ = false;

  update_btl_bw(ev);
  check_cycle_phase(ev);
  check_full_pipe(ev);
  check_drain(ev);
  update_rtprop(ev);
  check_probe_rtt(ev);

  set_pacing_rate_with_gain(pacing_gain_);
  set_cwnd(ev);
}

void Bbr::update_round(const AckEvent& ev) {
  round_start_ = false;
  if (ev.acked_bytes == 0) return;
  if (ev.rate.prior_delivered >= next_round_delivered_) {
    next_round_delivered_ = ev.total_delivered;
    ++round_count_;
    round_start_ = true;
    btl_bw_.expire(round_count_);
  }
}

void Bbr::update_btl_bw(const AckEvent& ev) {
  if (!ev.rate.valid) return;
  if (ev.rate.delivery_rate_bps >= btl_bw_bps() || !ev.rate.is_app_limited) {
    btl_bw_.update(ev.rate.delivery_rate_bps, round_count_);
  }
}

void Bbr::check_cycle_phase(const AckEvent& ev) {
  if (mode_ != Mode::ProbeBw) return;
  const bool full_length = rtprop_ && (ev.now - cycle_stamp_) > *rtprop_;
  bool next = false;
  if (pacing_gain_ == 1.0) {
    next = full_length;
  } else if (pacing_gain_ > 1.0) {
    next = full_length && (ev.newly_lost_bytes > 0 || ev.prior_in_flight >= inflight_for(pacing_gain_));
  } else {
    next = full_length || ev.prior_in_flight <= inflight_for(1.0);
  }
  if (next) advance_cycle_phase(ev.now);
}

void Bbr::check_full_pipe(const AckEvent& ev) {
  if (filled_pipe_ || !round_start_ || ev.rate.is_app_limited) return;
  const double bw = btl_bw_bps();
  if (bw >= full_bw_ * kFullBwThresh) {
    full_bw_ = bw;
    full_bw_count_ = 0;
    return;
  }
  if (++full_bw_count_ >= kFullBwCount) filled_pipe_ = true;
}

void Bbr::check_drain(const AckEvent& ev) {
  if (mode_ == Mode::Startup && filled_pipe_) enter_drain();
  if (mode_ == Mode::Drain && ev.bytes_in_flight <= inflight_for(1.0)) enter_probe_bw(ev.now);
}

void Bbr::update_rtprop(const AckEvent& ev) {
  rtprop_expired_ = ev.now > rtprop_stamp_ + kRtpropFilterLen;
  if (ev.rtt_sample && (!rtprop_ || *ev.rtt_sample <= *rtprop_ || rtprop_expired_)) {
    rtprop_ = *ev.rtt_sample;
    rtprop_stamp_ = ev.now;
  }
}

void Bbr::check_probe_rtt(const AckEvent& ev) {
  if (mode_ != Mode::ProbeRtt && rtprop_expired_ && !idle_restart_) {
    mode_ = Mode::ProbeRtt;
    pacing_gain_ = 1.0;
    cwnd_gain_ = 1.0;
    save_cwnd();
    probe_rtt_done_stamp_.reset();
  }
  if (mode_ == Mode::ProbeRtt) {
    if (!probe_rtt_done_stamp_ && ev.bytes_in_flight <= min_pipe_cwnd()) {
      probe_rtt_done_stamp_ = ev.now + kProbeRttDuration;
      probe_rtt_round_done_ = false;
      next_round_delivered_ = ev.total_delivered;
    } else if (probe_rtt_done_stamp_) {
      if (round_start_) probe_rtt_round_done_ = true;
      if (probe_rtt_round_done_ && ev.now > *probe_rtt_done_stamp_) {
        rtprop_stamp_ = ev.now;
        restore_cwnd();
        if (filled_pipe_) {
          enter_probe_bw(ev.now);
        } else {
          enter_startup();
        }
      }
    }
  }
  idle_restart_ = false;
}

void Bbr::set_pacing_rate_with_gain(double gain) {
  const double bw = btl_bw_bps();
  if (bw <= 0.0) return;
  const double rate = gain * bw;
  if (filled_pipe_ || rate > pacing_rate_) pacing_rate_ = rate;
}

void Bbr::set_cwnd(const AckEvent& ev) {
  const std::uint64_t target = inflight_for(cwnd_gain_);
  if (packet_conservation_) {
    cwnd_ = std::max(cwnd_, ev.bytes_in_flight + ev.acked_bytes);
  } else if (filled_pipe_) {
    cwnd_ = std::min(cwnd_ + ev.acked_bytes, target);
  } else if (cwnd_ < target || ev.total_delivered < std::uint64_t{params_.initial_cwnd_packets} * params_.mss) {
    cwnd_ += ev.acked_bytes;
  }
  cwnd_ = std::max(cwnd_, min_pipe_cwnd());
  if (mode_ == Mode::ProbeRtt) cwnd_ = std::min(cwnd_, min_pipe_cwnd());
}

void Bbr::on_loss(const LossEvent& ev) {
  if (!in_recovery_) {
    in_recovery_ = true;
    recovery_end_ = ev.largest_sent;
    save_cwnd();
    cwnd_ = ev.bytes_in_flight + params_.mss;
    packet_conservation_ = true;
    conservation_round_ = round_count_;
  } else {
    cwnd_ = cwnd_ > ev.lost_bytes + params_.mss ? cwnd_ - ev.lost_bytes : params_.mss;
  }
}

void Bbr::on_timeout(const TimeoutEvent& ev) {
  save_cwnd();
  cwnd_ = params_.mss;
  in_recovery_ = true;
  packet_conservation_ = false;
  recovery_end_ = ev.largest_sent;
}

void Bbr::enter_startup() {
  mode_ = Mode::Startup;
  pacing_gain_ = kHighGain;
  cwnd_gain_ = kHighGain;
}

void Bbr::enter_drain() {
  mode_ = Mode::Drain;
  pacing_gain_ = 1.0 / kHighGain;
  cwnd_gain_ = kHighGain;
}

void Bbr::enter_probe_bw(SimTime now) {
  mode_ = Mode::ProbeBw;
  pacing_gain_ = 1.0;
  cwnd_gain_ = kCwndGain;
  // Random start phase, never the 0.75 drain phase.
  cycle_index_ = kPacingGainCycle.size() - 1 - static_cast<std::size_t>(rng_.below(kPacingGainCycle.size() - 1));
  advance_cycle_phase(now);
}

void Bbr::advance_cycle_phase(SimTime now) {
  cycle_stamp_ = now;
  cycle_index_ = (cycle_index_ + 1) % kPacingGainCycle.size();
  pacing_gain_ = kPacingGainCycle[cycle_index_];
}

void Bbr::save_cwnd() {
  if (!in_recovery_ && mode_ != Mode::ProbeRtt) {
    prior_cwnd_ = cwnd_;
  } else {
    prior_cwnd_ = std::max(prior_cwnd_, cwnd_);
  }
}

void Bbr::restore_cwnd() { cwnd_ = std::max(cwnd_, prior_cwnd_); }

}  // namespace satdash::cc
