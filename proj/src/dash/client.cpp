// SPDX-License-Identifier: Apache-2.0
#include "satdash/dash/client.hpp"

#include <stdexcept>

namespace satdash::dash {
namespace {

PlaybackConfig playback_config(const ClientConfig& cfg) {
  PlaybackConfig p;
  p.content_duration = cfg.manifest.content_duration;
  p.resume_threshold = cfg.effective_resume_threshold();
  p.max_buffer_bytes = cfg.max_buffer_bytes;
  return p;
}

}  // namespace

void ClientConfig::validate() const {
  manifest.validate();
  fdash.validate();
  if (effective_resume_threshold() <= Duration::zero())
    throw std::invalid_argument("client: resume threshold must be positive");
  if (engine::from_seconds(fdash.target_buffer_s) < manifest.segment_duration)
    throw std::invalid_argument("client: target buffer must hold at least one segment");
  if (max_buffer_bytes == 0) throw std::invalid_argument("client: buffer size must be positive");
}

DashClient::DashClient(engine::Simulator& sim, transport::Connection& conn, ClientConfig cfg)
    : sim_(sim),
      conn_(conn),
      cfg_((cfg.validate(), std::move(cfg))),
      fdash_(cfg_.fdash),
      estimator_(cfg_.estimation_granularity, cfg_.estimate_alpha),
      playback_(playback_config(cfg_), sim.now()),
      playback_timer_(sim, [this] { sync_playback(); }),
      request_timer_(sim, [this] { maybe_request(); }) {
  conn_.on_data([this](transport::StreamId s, std::span<const std::uint8_t> b, bool) { on_data(s, b); });
  conn_.on_close([this] {
    // Losing the connection only matters while media is still to be fetched.
    if (outstanding_ || next_segment_ < cfg_.manifest.segment_count()) finish();
  });
}

void DashClient::start() { maybe_request(); }

void DashClient::finish() {
  if (finished()) return;
  playback_.finish(sim_.now());
  playback_timer_.cancel();
  request_timer_.cancel();
  if (on_finished_) on_finished_();
}

void DashClient::sync_playback() {
  if (finished()) return;
  playback_.advance_to(sim_.now());
  if (playback_.content_done()) {
    finish();
    return;
  }
  if (auto t = playback_.next_transition()) playback_timer_.arm(*t);
}

void DashClient::maybe_request() {
  if (finished() || outstanding_ || next_segment_ >= cfg_.manifest.segment_count()) return;
  if (conn_.closed()) return;
  const SimTime now = sim_.now();
  playback_.advance_to(now);

  const Duration seg_duration = cfg_.manifest.segment(next_segment_, 0).duration;
  const Duration target = engine::from_seconds(cfg_.fdash.target_buffer_s);
  const Duration level = playback_.buffer_level();
  if (playback_.playing() && level + seg_duration > target) {
    request_timer_.arm(now + (level + seg_duration - target));
    return;
  }

  double delta = 0.0;
  if (last_decision_ && now > last_decision_->first) {
    delta = engine::to_seconds(level - last_decision_->second) / engine::to_seconds(now - last_decision_->first);
  }
  const double factor = fdash_.decide(engine::to_seconds(level), delta);
  Representation rep = select_representation(cfg_.manifest.ladder, factor, estimator_.estimate_bps());
  if (!selections_.empty() && estimator_.estimate_bps()) {
    rep = hold_or_switch(cfg_.manifest.ladder, cfg_.manifest.ladder.at(selections_.back()), rep, engine::to_seconds(level),
                         *estimator_.estimate_bps(), cfg_.fdash);
  }
  const Segment seg = cfg_.manifest.segment(next_segment_, rep.index);

  if (playback_.playing() && playback_.buffered_bytes() + seg.size_bytes > cfg_.max_buffer_bytes) {
    request_timer_.arm(now + seg_duration / 4);
    return;
  }

  last_decision_ = {now, level};
  const transport::StreamId stream = conn_.open_stream();
  const bool own_stream = conn_.mode() == transport::TransportMode::QuicLike;
  if (own_stream) reader_ = ResponseReader{};
  outstanding_ = Outstanding{seg, now, stream};
  selections_.push_back(rep.index);
  ++next_segment_;
  const auto req = encode_request({seg.index, static_cast<std::uint32_t>(rep.index)});
  conn_.send(stream, req, own_stream);
}

void DashClient::on_data(transport::StreamId stream, std::span<const std::uint8_t> bytes) {
  if (finished() || !outstanding_ || stream != outstanding_->stream) return;
  const auto progress = reader_.feed(bytes);
  body_bytes_ += progress.body_bytes;
  if (progress.completed == 0) return;
  if (reader_.last_completed_length() != outstanding_->seg.size_bytes)
    throw ProtocolError("response length does not match the requested segment");
  complete_segment();
}

void DashClient::complete_segment() {
  const Outstanding done = *outstanding_;
  outstanding_.reset();
  const SimTime now = sim_.now();
  estimator_.on_segment(done.seg.size_bytes, now - done.requested);
  playback_.add_segment(now, done.seg);
  sync_playback();
  maybe_request();
}

}  // namespace satdash::dash
