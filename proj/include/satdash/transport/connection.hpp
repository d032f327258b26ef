// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "satdash/cc/congestion_controller.hpp"
#include "satdash/engine/simulator.hpp"
#include "satdash/transport/config.hpp"
#include "satdash/transport/frames.hpp"
#include "satdash/transport/interval_set.hpp"
#include "satdash/transport/rtt_estimator.hpp"
#include "satdash/transport/stream.hpp"
#include "satdash/transport/trace.hpp"

namespace satdash::transport {

/// Raised by send() once the connection has closed.
class ConnectionClosed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Peer behavior that cannot happen with a correct implementation, such as
/// acknowledging a packet number that was never sent.
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Perspective { Client, Server };

struct ConnectionStats {
  std::uint64_t packets_sent = 0;
  std::uint64_t ack_only_packets = 0;
  std::uint64_t packets_lost = 0;
  std::uint64_t retransmitted_bytes = 0;
  std::uint64_t tail_loss_probes = 0;
  std::uint64_t rto_count = 0;
  std::uint64_t payload_bytes_sent = 0;
  std::uint64_t wire_bytes_sent = 0;
  std::uint64_t app_bytes_delivered = 0;
};

/// One endpoint of a reliable connection. Both endpoints are created
/// "connected"; there is no handshake.
///
/// TcpLike carries a single stream (id 0) whose bytes are delivered strictly
/// in order. QuicLike carries any number of bidirectional streams with
/// independent ordering; the client opens ids 0, 4, 8, ... and the server
/// 1, 5, 9, ...
class Connection {
 public:
  /// Hands a packet to the network along with its size on the wire.
  using PacketSink = std::function<void(std::shared_ptr<const Datagram>, std::uint32_t wire_bytes)>;
  /// Newly deliverable bytes of one stream, in offset order. `fin` is set
  /// with the final chunk.
  using DataHandler = std::function<void(StreamId, std::span<const std::uint8_t>, bool fin)>;
  using CloseHandler = std::function<void()>;

  enum class TimerKind { LossDetection, DelayedAck, Idle, Pacing };

  Connection(engine::Simulator& sim, ConnectionId id, TransportMode mode, Perspective side, TransportConfig config,
             std::unique_ptr<cc::CongestionController> controller, PacketSink sink);
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  void on_data(DataHandler h) { on_data_ = std::move(h); }
  void on_close(CloseHandler h) { on_close_ = std::move(h); }
  void set_trace(TransportTrace* t) { trace_ = t; }
  void set_cc_trace(CcTrace* t) { cc_trace_ = t; }

  /// Allocates a new locally initiated stream. TcpLike always returns 0.
  StreamId open_stream();
  /// Appends bytes to a stream's send buffer and sends whatever the window
  /// and pacing allow. Throws ConnectionClosed after close, and
  /// std::invalid_argument for a stream id TcpLike does not have or a write
  /// after FIN.
  void send(StreamId stream, std::span<const std::uint8_t> bytes, bool fin = false);

  void on_packet_received(const Datagram& d);
  /// Processes an acknowledgment; normally reached via on_packet_received.
  void on_ack(const AckFrame& ack);
  /// Fires the named timer's action immediately. Exposed for tests; the
  /// connection arms its own engine timers.
  void on_timer(TimerKind which);

  /// Half of the latest RTT sample, in milliseconds.
  std::optional<double> latency_sample_ms() const;

  void close();
  bool closed() const { return closed_; }

  ConnectionId id() const { return id_; }
  TransportMode mode() const { return mode_; }
  const TransportConfig& config() const { return config_; }
  const RttEstimator& rtt() const { return rtt_; }
  const cc::CongestionController& controller() const { return *cc_; }
  std::uint64_t bytes_in_flight() const { return bytes_in_flight_; }
  PacketNumber next_packet_number() const { return next_pn_; }
  std::optional<PacketNumber> largest_acked() const { return largest_acked_; }
  std::uint32_t consecutive_probes() const { return tlp_count_; }
  std::uint32_t consecutive_rtos() const { return rto_count_; }
  const ConnectionStats& stats() const { return stats_; }
  /// Deadline of the loss-detection timer, if armed.
  std::optional<engine::SimTime> loss_timer_deadline() const;
  std::optional<engine::SimTime> ack_timer_deadline() const;

 private:
  struct FrameRef {
    StreamId stream;
    std::uint64_t offset;
    std::uint64_t length;
    bool fin;
  };
  struct SentPacket {
    engine::SimTime time_sent{};
    std::uint64_t bytes = 0;
    std::vector<FrameRef> frames;
    // Rate-sample snapshot at send time.
    std::uint64_t delivered = 0;
    engine::SimTime delivered_time{};
    engine::SimTime first_sent_time{};
    bool is_app_limited = false;
  };
  struct StreamState {
    SendStream send;
    RecvStream recv;
  };
  struct RetxChunk {
    std::uint64_t length = 0;
    bool fin = false;
  };

  StreamState& stream_for_send(StreamId id);
  StreamState& stream_for_recv(StreamId id);
  void check_stream_id(StreamId id) const;

  void try_send();
  std::uint64_t pending_payload() const;
  bool has_pending_data() const;
  void prune_retransmissions();
  bool send_packet(bool probe, std::uint64_t budget);
  bool fill_probe(Datagram& d, std::vector<FrameRef>& refs);
  void fill_from_retransmissions(Datagram& d, std::vector<FrameRef>& refs, std::uint64_t& budget);
  void fill_from_new_data(Datagram& d, std::vector<FrameRef>& refs, std::uint64_t& budget);
  void send_ack_only();
  AckFrame build_ack();
  void emit(std::shared_ptr<Datagram> d);

  void on_stream_frame(const StreamFrame& f);
  void mark_acked(const SentPacket& p);
  void requeue(const SentPacket& p);

  void arm_loss_timer();
  void on_loss_timer();
  void send_probe();
  void on_rto();
  void touch_idle();
  void record_cc();
  void trace(TraceKind kind, PacketNumber pn, StreamId stream, std::uint64_t bytes, engine::Duration rtt = {});

  engine::Simulator& sim_;
  ConnectionId id_;
  TransportMode mode_;
  Perspective side_;
  TransportConfig config_;
  std::unique_ptr<cc::CongestionController> cc_;
  PacketSink sink_;
  DataHandler on_data_;
  CloseHandler on_close_;
  TransportTrace* trace_ = nullptr;
  CcTrace* cc_trace_ = nullptr;

  bool closed_ = false;
  std::map<StreamId, StreamState> streams_;
  StreamId next_local_stream_;
  StreamId last_served_stream_ = 0;
  bool served_any_ = false;
  std::uint64_t send_buffered_ = 0;

  // Sender.
  PacketNumber next_pn_ = 0;
  std::map<PacketNumber, SentPacket> sent_;
  std::map<std::pair<StreamId, std::uint64_t>, RetxChunk> retx_;
  std::uint64_t bytes_in_flight_ = 0;
  std::optional<PacketNumber> largest_acked_;
  engine::SimTime last_ack_eliciting_sent_{};
  bool eliciting_since_receive_ = false;
  RttEstimator rtt_;
  std::uint32_t tlp_count_ = 0;
  std::uint32_t rto_count_ = 0;
  engine::SimTime next_send_time_{};
  bool cwnd_limited_ = false;

  // Delivery-rate sampling.
  std::uint64_t delivered_ = 0;
  engine::SimTime delivered_time_{};
  engine::SimTime first_sent_time_{};
  std::uint64_t app_limited_until_ = 0;

  // Receiver.
  IntervalSet received_pns_;
  std::optional<PacketNumber> largest_received_;
  engine::SimTime largest_received_time_{};
  bool ack_pending_ = false;
  bool ack_now_ = false;
  std::uint32_t unacked_eliciting_ = 0;
  std::vector<std::uint8_t> scratch_;

  ConnectionStats stats_;

  engine::Timer loss_timer_;
  engine::Timer ack_timer_;
  engine::Timer idle_timer_;
  engine::Timer pacing_timer_;
};

}  // namespace satdash::transport
