// SPDX-License-Identifier: Apache-2.0
#include "satdash/transport/connection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace satdash::transport {

using namespace std::chrono_literals;
using engine::SimTime;

Connection::Connection(engine::Simulator& sim, ConnectionId id, TransportMode mode, Perspective side,
                       TransportConfig config, std::unique_ptr<cc::CongestionController> controller, PacketSink sink)
    : sim_(sim),
      id_(id),
      mode_(mode),
      side_(side),
      config_(config),
      cc_(std::move(controller)),
      sink_(std::move(sink)),
      next_local_stream_(side == Perspective::Client ? 0 : 1),
      rtt_(config.initial_rtt),
      loss_timer_(sim, [this] { on_timer(TimerKind::LossDetection); }),
      ack_timer_(sim, [this] { on_timer(TimerKind::DelayedAck); }),
      idle_timer_(sim, [this] { on_timer(TimerKind::Idle); }),
      pacing_timer_(sim, [this] { on_timer(TimerKind::Pacing); }) {
  config_.validate();
  if (!cc_) throw std::invalid_argument("Connection: congestion controller required");
  if (!sink_) throw std::invalid_argument("Connection: packet sink required");
  if (mode_ == TransportMode::TcpLike) streams_.try_emplace(0);
  next_send_time_ = sim_.now();
  idle_timer_.arm_in(config_.idle_timeout);
}

void Connection::check_stream_id(StreamId id) const {
  if (mode_ == TransportMode::TcpLike && id != 0)
    throw std::invalid_argument("TcpLike connection has a single stream (id 0), got " + std::to_string(id));
}

Connection::StreamState& Connection::stream_for_send(StreamId id) {
  check_stream_id(id);
  return streams_.try_emplace(id).first->second;
}

Connection::StreamState& Connection::stream_for_recv(StreamId id) {
  if (mode_ == TransportMode::TcpLike && id != 0) throw ProtocolViolation("frame for stream " + std::to_string(id) + " on TcpLike connection");
  return streams_.try_emplace(id).first->second;
}

StreamId Connection::open_stream() {
  if (mode_ == TransportMode::TcpLike) return 0;
  const StreamId id = next_local_stream_;
  next_local_stream_ += 4;
  streams_.try_emplace(id);
  return id;
}

void Connection::send(StreamId stream, std::span<const std::uint8_t> bytes, bool fin) {
  if (closed_) throw ConnectionClosed("send on closed connection " + std::to_string(id_));
  auto& st = stream_for_send(stream);
  if (st.send.fin_written()) throw std::invalid_argument("send after FIN on stream " + std::to_string(stream));
  if (send_buffered_ + bytes.size() > config_.max_send_buffer) throw std::length_error("send buffer limit exceeded");
  st.send.write(bytes, fin);
  send_buffered_ += bytes.size();
  try_send();
}

// ---------------------------------------------------------------------------
// Sending

void Connection::prune_retransmissions() {
  for (auto it = retx_.begin(); it != retx_.end();) {
    const auto& ss = streams_.at(it->first.first).send;
    const std::uint64_t off = it->first.second;
    const bool done = ss.acked().covers(off, off + it->second.length) && (!it->second.fin || ss.fin_acked());
    it = done ? retx_.erase(it) : std::next(it);
  }
}

bool Connection::has_pending_data() const {
  if (!retx_.empty()) return true;
  return std::any_of(streams_.begin(), streams_.end(), [](const auto& kv) { return kv.second.send.has_unsent(); });
}

std::uint64_t Connection::pending_payload() const {
  const std::uint64_t cap = config_.max_payload;
  std::uint64_t n = 0;
  for (const auto& [key, chunk] : retx_) {
    n += chunk.length;
    if (n >= cap) return cap;
  }
  for (const auto& [id, st] : streams_) {
    n += st.send.unsent_bytes();
    if (n >= cap) return cap;
  }
  return n;
}

void Connection::try_send() {
  if (closed_) return;
  for (;;) {
    prune_retransmissions();
    if (!has_pending_data()) {
      if (bytes_in_flight_ < cc_->cwnd_bytes()) app_limited_until_ = std::max<std::uint64_t>(delivered_ + bytes_in_flight_, 1);
      break;
    }
    const std::uint64_t need = pending_payload();
    if (bytes_in_flight_ + need > cc_->cwnd_bytes()) {
      cwnd_limited_ = true;
      break;
    }
    if (cc_->paces() && sim_.now() < next_send_time_) {
      cwnd_limited_ = true;
      pacing_timer_.arm(next_send_time_);
      break;
    }
    if (!send_packet(false, need)) break;
  }
  if (ack_pending_ && ack_now_) send_ack_only();
}

void Connection::fill_from_retransmissions(Datagram& d, std::vector<FrameRef>& refs, std::uint64_t& budget) {
  while (!retx_.empty()) {
    auto it = retx_.begin();
    const auto [sid, off] = it->first;
    const RetxChunk chunk = it->second;
    const auto& ss = streams_.at(sid).send;
    const std::uint64_t end = off + chunk.length;

    std::uint64_t cur = off;
    while (cur < end && ss.acked().contains(cur)) cur = ss.acked().contiguous_end(cur);
    const bool fin_needed = chunk.fin && !ss.fin_acked();
    if (cur >= end) {
      retx_.erase(it);
      if (fin_needed) {
        d.frames.push_back({sid, end, {}, true});
        refs.push_back({sid, end, 0, true});
      }
      continue;
    }
    if (budget == 0) break;

    auto next_acked = ss.acked().ranges().upper_bound(cur);
    const std::uint64_t run_end = next_acked == ss.acked().ranges().end() ? end : std::min(end, next_acked->first);
    const std::uint64_t take = std::min(budget, run_end - cur);
    const bool fin = fin_needed && cur + take == end;
    d.frames.push_back({sid, cur, ss.copy(cur, take), fin});
    refs.push_back({sid, cur, take, fin});
    budget -= take;
    stats_.retransmitted_bytes += take;

    retx_.erase(it);
    if (cur + take < end) {
      auto& rest = retx_[{sid, cur + take}];
      rest.length = std::max(rest.length, end - cur - take);
      rest.fin = rest.fin || chunk.fin;
    }
  }
}

void Connection::fill_from_new_data(Datagram& d, std::vector<FrameRef>& refs, std::uint64_t& budget) {
  if (streams_.empty()) return;
  // Round-robin: start after the stream that led the previous packet.
  auto start = served_any_ ? streams_.upper_bound(last_served_stream_) : streams_.begin();
  if (start == streams_.end()) start = streams_.begin();
  auto it = start;
  bool led = false;
  do {
    auto& ss = it->second.send;
    if (ss.has_unsent()) {
      if (budget == 0 && ss.unsent_bytes() > 0) break;
      const auto claim = ss.claim_new(budget);
      if (claim.length > 0 || claim.fin) {
        d.frames.push_back({it->first, claim.offset, ss.copy(claim.offset, claim.length), claim.fin});
        refs.push_back({it->first, claim.offset, claim.length, claim.fin});
        budget -= claim.length;
        if (!led) {
          last_served_stream_ = it->first;
          served_any_ = true;
          led = true;
        }
      }
    }
    if (++it == streams_.end()) it = streams_.begin();
  } while (it != start);
}

bool Connection::fill_probe(Datagram& d, std::vector<FrameRef>& refs) {
  const SentPacket& last = sent_.rbegin()->second;
  for (const FrameRef& f : last.frames) {
    const auto& ss = streams_.at(f.stream).send;
    const bool fin_needed = f.fin && !ss.fin_acked();
    const std::uint64_t end = f.offset + f.length;
    const std::uint64_t begin = std::min(end, std::max(f.offset, ss.released_offset()));
    if (ss.acked().covers(begin, end) && !fin_needed) continue;
    const std::uint64_t len = end > begin ? end - begin : 0;
    d.frames.push_back({f.stream, begin, ss.copy(begin, len), fin_needed});
    refs.push_back({f.stream, begin, len, fin_needed});
    stats_.retransmitted_bytes += len;
  }
  return !refs.empty();
}

AckFrame Connection::build_ack() {
  AckFrame a;
  a.largest = received_pns_.max();
  a.ack_delay = sim_.now() - largest_received_time_;
  const auto& ranges = received_pns_.ranges();
  for (auto it = ranges.rbegin(); it != ranges.rend() && a.ranges.size() < kMaxAckRanges; ++it)
    a.ranges.push_back({it->first, it->second - 1});
  return a;
}

bool Connection::send_packet(bool probe, std::uint64_t budget) {
  auto d = std::make_shared<Datagram>();
  d->connection = id_;
  std::vector<FrameRef> refs;

  if (!probe || !fill_probe(*d, refs)) {
    if (probe) budget = config_.max_payload;
    fill_from_retransmissions(*d, refs, budget);
    fill_from_new_data(*d, refs, budget);
  }
  if (refs.empty()) return false;

  const SimTime now = sim_.now();
  d->number = next_pn_++;
  if (ack_pending_) d->ack = build_ack();

  SentPacket p;
  p.time_sent = now;
  p.bytes = d->payload_bytes();
  p.frames = std::move(refs);
  if (bytes_in_flight_ == 0) {
    first_sent_time_ = now;
    delivered_time_ = now;
  }
  p.delivered = delivered_;
  p.delivered_time = delivered_time_;
  p.first_sent_time = first_sent_time_;
  p.is_app_limited = app_limited_until_ != 0;

  cc_->on_packet_sent(now, p.bytes, bytes_in_flight_);
  bytes_in_flight_ += p.bytes;
  stats_.payload_bytes_sent += p.bytes;
  trace(probe ? TraceKind::Probe : TraceKind::Sent, d->number, p.frames.front().stream, p.bytes);

  if (cc_->paces() && !probe) {
    const double rate = cc_->pacing_rate_bps();
    const auto gap = engine::Duration(static_cast<std::int64_t>(std::ceil(static_cast<double>(p.bytes) * 8e9 / rate)));
    next_send_time_ = std::max(next_send_time_, now) + gap;
  }

  last_ack_eliciting_sent_ = now;
  if (!eliciting_since_receive_) {
    eliciting_since_receive_ = true;
    idle_timer_.arm_in(config_.idle_timeout);
  }
  sent_.emplace(d->number, std::move(p));
  arm_loss_timer();
  emit(std::move(d));
  return true;
}

void Connection::send_ack_only() {
  auto d = std::make_shared<Datagram>();
  d->connection = id_;
  d->number = next_pn_++;
  d->ack = build_ack();
  ++stats_.ack_only_packets;
  emit(std::move(d));
}

void Connection::emit(std::shared_ptr<Datagram> d) {
  std::uint32_t wire = kPacketHeaderBytes + static_cast<std::uint32_t>(d->payload_bytes());
  if (d->ack) {
    wire += ack_frame_bytes(*d->ack);
    ack_pending_ = false;
    ack_now_ = false;
    unacked_eliciting_ = 0;
    ack_timer_.cancel();
  }
  ++stats_.packets_sent;
  stats_.wire_bytes_sent += wire;
  sink_(std::move(d), wire);
}

// ---------------------------------------------------------------------------
// Receiving

void Connection::on_packet_received(const Datagram& d) {
  if (closed_) return;
  const SimTime now = sim_.now();
  idle_timer_.arm_in(config_.idle_timeout);
  eliciting_since_receive_ = false;

  const PacketNumber pn = d.number;
  const bool duplicate = received_pns_.contains(pn);
  const bool out_of_order = pn != (largest_received_ ? *largest_received_ + 1 : 0);
  if (!duplicate) {
    received_pns_.insert(pn, pn + 1);
    while (received_pns_.size() > kMaxAckRanges) received_pns_.erase_below(std::next(received_pns_.ranges().begin())->first);
    if (!largest_received_ || pn > *largest_received_) {
      largest_received_ = pn;
      largest_received_time_ = now;
    }
  }

  if (d.ack) on_ack(*d.ack);
  if (closed_) return;

  if (d.ack_eliciting()) {
    ack_pending_ = true;
    ++unacked_eliciting_;
    if (duplicate || out_of_order || unacked_eliciting_ >= config_.ack_frequency) {
      ack_now_ = true;
    } else if (!ack_timer_.armed()) {
      ack_timer_.arm_in(config_.delayed_ack_timeout);
    }
    if (!duplicate) {
      for (const StreamFrame& f : d.frames) {
        on_stream_frame(f);
        if (closed_) return;
      }
    }
  }
  try_send();
}

void Connection::on_stream_frame(const StreamFrame& f) {
  auto& st = stream_for_recv(f.stream);
  scratch_.clear();
  const bool fin_now = st.recv.on_frame(f.offset, f.data, f.fin, scratch_);
  if (scratch_.empty() && !fin_now) return;
  stats_.app_bytes_delivered += scratch_.size();
  trace(TraceKind::Delivered, 0, f.stream, scratch_.size());
  if (on_data_) {
    // The handler may send on this connection, which can reuse scratch_.
    const std::vector<std::uint8_t> chunk = std::move(scratch_);
    scratch_.clear();
    on_data_(f.stream, chunk, fin_now);
  }
}

void Connection::mark_acked(const SentPacket& p) {
  for (const FrameRef& f : p.frames) send_buffered_ -= streams_.at(f.stream).send.on_acked(f.offset, f.length, f.fin);
}

void Connection::requeue(const SentPacket& p) {
  for (const FrameRef& f : p.frames) {
    const auto& ss = streams_.at(f.stream).send;
    if (ss.acked().covers(f.offset, f.offset + f.length) && (!f.fin || ss.fin_acked())) continue;
    auto& c = retx_[{f.stream, f.offset}];
    c.length = std::max(c.length, f.length);
    c.fin = c.fin || f.fin;
  }
}

void Connection::on_ack(const AckFrame& ack) {
  if (closed_) return;
  if (ack.largest >= next_pn_)
    throw ProtocolViolation("ACK for unsent packet " + std::to_string(ack.largest) + " on connection " + std::to_string(id_));
  const SimTime now = sim_.now();

  std::vector<std::pair<PacketNumber, SentPacket>> acked;
  for (const AckRange& r : ack.ranges) {
    if (r.largest >= next_pn_ || r.smallest > r.largest) throw ProtocolViolation("malformed ACK range");
    for (auto it = sent_.lower_bound(r.smallest); it != sent_.end() && it->first <= r.largest;) {
      acked.emplace_back(it->first, std::move(it->second));
      it = sent_.erase(it);
    }
  }
  if (acked.empty()) return;
  std::sort(acked.begin(), acked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  largest_acked_ = std::max(largest_acked_.value_or(0), ack.largest);
  std::optional<engine::Duration> sample;
  if (acked.back().first == ack.largest) {
    sample = now - acked.back().second.time_sent;
    rtt_.on_sample(*sample);
    trace(TraceKind::RttSample, ack.largest, 0, 0, *sample);
  }

  const std::uint64_t prior_in_flight = bytes_in_flight_;
  std::uint64_t acked_bytes = 0;
  const SentPacket* newest = nullptr;
  for (const auto& [pn, p] : acked) {
    bytes_in_flight_ -= p.bytes;
    acked_bytes += p.bytes;
    mark_acked(p);
    trace(TraceKind::Acked, pn, p.frames.empty() ? 0 : p.frames.front().stream, p.bytes);
    delivered_ += p.bytes;
    delivered_time_ = now;
    if (!newest || p.delivered > newest->delivered || (p.delivered == newest->delivered && p.time_sent > newest->time_sent))
      newest = &p;
  }

  cc::RateSample rs;
  rs.prior_delivered = newest->delivered;
  rs.is_app_limited = newest->is_app_limited;
  first_sent_time_ = newest->time_sent;
  const engine::Duration send_elapsed = newest->time_sent - newest->first_sent_time;
  const engine::Duration ack_elapsed = delivered_time_ - newest->delivered_time;
  rs.interval = std::max(send_elapsed, ack_elapsed);
  rs.delivered = delivered_ - newest->delivered;
  const auto min_rtt = rtt_.min_rtt().value_or(engine::Duration::zero());
  rs.valid = rs.interval > engine::Duration::zero() && rs.interval >= min_rtt && rs.delivered > 0;
  if (rs.valid) rs.delivery_rate_bps = static_cast<double>(rs.delivered) * 8.0 / engine::to_seconds(rs.interval);
  if (app_limited_until_ != 0 && delivered_ > app_limited_until_) app_limited_until_ = 0;

  // Packet-threshold loss detection.
  std::uint64_t lost_bytes = 0;
  PacketNumber largest_lost = 0;
  bool any_lost = false;
  while (!sent_.empty() && sent_.begin()->first + config_.reordering_threshold <= *largest_acked_) {
    auto node = sent_.extract(sent_.begin());
    const SentPacket& p = node.mapped();
    bytes_in_flight_ -= p.bytes;
    lost_bytes += p.bytes;
    largest_lost = node.key();
    any_lost = true;
    ++stats_.packets_lost;
    trace(TraceKind::Lost, node.key(), p.frames.empty() ? 0 : p.frames.front().stream, p.bytes);
    requeue(p);
  }
  if (any_lost) cc_->on_loss({now, lost_bytes, largest_lost, next_pn_ - 1, bytes_in_flight_});

  cc::AckEvent ev;
  ev.now = now;
  ev.acked_bytes = acked_bytes;
  ev.rtt_sample = sample;
  ev.min_rtt = min_rtt;
  ev.smoothed_rtt = rtt_.srtt();
  ev.largest_acked = *largest_acked_;
  ev.prior_in_flight = prior_in_flight;
  ev.bytes_in_flight = bytes_in_flight_;
  ev.total_delivered = delivered_;
  ev.newly_lost_bytes = lost_bytes;
  ev.app_limited = !cwnd_limited_;
  ev.rate = rs;
  cc_->on_ack(ev);
  cwnd_limited_ = false;

  tlp_count_ = 0;
  rto_count_ = 0;
  arm_loss_timer();
  record_cc();
  try_send();
}

// ---------------------------------------------------------------------------
// Timers

void Connection::on_timer(TimerKind which) {
  if (closed_) return;
  switch (which) {
    case TimerKind::LossDetection:
      on_loss_timer();
      break;
    case TimerKind::DelayedAck:
      if (ack_pending_) {
        ack_now_ = true;
        try_send();
      }
      break;
    case TimerKind::Idle:
      close();
      break;
    case TimerKind::Pacing:
      try_send();
      break;
  }
}

void Connection::arm_loss_timer() {
  if (closed_ || sent_.empty()) {
    loss_timer_.cancel();
    return;
  }
  const engine::Duration rto = rtt_.rto(config_.min_rto);
  engine::Duration timeout;
  if (tlp_count_ < config_.max_tail_loss_probes) {
    const engine::Duration srtt = rtt_.srtt();
    engine::Duration pto = 2 * srtt;
    if (sent_.size() == 1) pto = std::max(pto, srtt * 3 / 2 + config_.delayed_ack_timeout);
    timeout = std::min(std::max<engine::Duration>(pto, 10ms), rto);
  } else {
    timeout = rto * (std::int64_t{1} << std::min<std::uint32_t>(rto_count_, 16));
  }
  loss_timer_.arm(std::max(sim_.now(), last_ack_eliciting_sent_ + timeout));
}

std::optional<SimTime> Connection::loss_timer_deadline() const {
  return loss_timer_.armed() ? std::optional(loss_timer_.deadline()) : std::nullopt;
}

std::optional<SimTime> Connection::ack_timer_deadline() const {
  return ack_timer_.armed() ? std::optional(ack_timer_.deadline()) : std::nullopt;
}

void Connection::on_loss_timer() {
  if (sent_.empty()) return;
  if (tlp_count_ < config_.max_tail_loss_probes) {
    send_probe();
  } else {
    on_rto();
  }
}

void Connection::send_probe() {
  ++tlp_count_;
  ++stats_.tail_loss_probes;
  if (!send_packet(true, config_.max_payload)) arm_loss_timer();
}

void Connection::on_rto() {
  ++rto_count_;
  ++stats_.rto_count;
  const SimTime now = sim_.now();
  trace(TraceKind::Timeout, next_pn_ - 1, 0, bytes_in_flight_);
  for (auto& [pn, p] : sent_) {
    ++stats_.packets_lost;
    trace(TraceKind::Lost, pn, p.frames.empty() ? 0 : p.frames.front().stream, p.bytes);
    requeue(p);
  }
  sent_.clear();
  bytes_in_flight_ = 0;
  cc_->on_timeout({now, next_pn_ - 1});
  record_cc();
  next_send_time_ = now;
  try_send();
  arm_loss_timer();
}

void Connection::close() {
  if (closed_) return;
  closed_ = true;
  loss_timer_.cancel();
  ack_timer_.cancel();
  idle_timer_.cancel();
  pacing_timer_.cancel();
  if (on_close_) on_close_();
}

std::optional<double> Connection::latency_sample_ms() const {
  const auto latest = rtt_.latest();
  if (!latest) return std::nullopt;
  return engine::to_millis(*latest) / 2.0;
}

void Connection::record_cc() {
  if (!cc_trace_) return;
  cc_trace_->push_back({sim_.now(), cc_->cwnd_bytes(), cc_->pacing_rate_bps(), std::string(cc_->mode())});
}

void Connection::trace(TraceKind kind, PacketNumber pn, StreamId stream, std::uint64_t bytes, engine::Duration rtt) {
  if (trace_ && trace_->wants(kind)) trace_->record({sim_.now(), kind, pn, stream, bytes, rtt});
}

}  // namespace satdash::transport
