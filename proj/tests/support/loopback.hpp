// SPDX-License-Identifier: Apache-2.0
// Two connected endpoints over a pair of netpath links, for transport tests.
#pragma once

#include <memory>

#include "satdash/netpath/link.hpp"
#include "satdash/transport/connection.hpp"

namespace satdash::testing {

struct Loopback {
  engine::Simulator sim;
  netpath::Link down;  // server -> client
  netpath::Link up;    // client -> server
  std::unique_ptr<transport::Connection> client;
  std::unique_ptr<transport::Connection> server;

  Loopback(transport::TransportMode mode, cc::Algorithm alg, netpath::LinkSpec down_spec, netpath::LinkSpec up_spec,
           transport::TransportConfig cfg = {}, std::uint64_t seed = 1)
      : down(sim, std::move(down_spec), engine::SeededRng(seed).substream(1), "down"),
        up(sim, std::move(up_spec), engine::SeededRng(seed).substream(2), "up") {
    cc::CcParams p;
    p.mss = cfg.max_payload;
    p.initial_cwnd_packets = cfg.initial_cwnd_packets;
    p.initial_ssthresh = cfg.initial_ssthresh_bytes;
    p.initial_rtt = cfg.initial_rtt;
    p.pace_loss_based = cfg.pace_loss_based;
    client = std::make_unique<transport::Connection>(
        sim, 1, mode, transport::Perspective::Client, cfg, cc::make_controller(alg, p, engine::SeededRng(seed + 10)),
        [this](std::shared_ptr<const transport::Datagram> d, std::uint32_t wire) { forward(up, std::move(d), wire); });
    server = std::make_unique<transport::Connection>(
        sim, 1, mode, transport::Perspective::Server, cfg, cc::make_controller(alg, p, engine::SeededRng(seed + 20)),
        [this](std::shared_ptr<const transport::Datagram> d, std::uint32_t wire) { forward(down, std::move(d), wire); });
    down.set_receiver([this](netpath::Packet pkt) {
      client->on_packet_received(static_cast<const transport::Datagram&>(*pkt.payload));
    });
    up.set_receiver([this](netpath::Packet pkt) {
      server->on_packet_received(static_cast<const transport::Datagram&>(*pkt.payload));
    });
  }

  static void forward(netpath::Link& link, std::shared_ptr<const transport::Datagram> d, std::uint32_t wire) {
    netpath::Packet pkt;
    pkt.size_bytes = wire;
    pkt.payload = std::move(d);
    link.transmit(std::move(pkt));
  }

  static const transport::Datagram& datagram(const netpath::Packet& p) {
    return static_cast<const transport::Datagram&>(*p.payload);
  }
};

inline netpath::LinkSpec link_spec(std::uint64_t rate_bps, engine::Duration prop, std::uint32_t queue = 1000,
                                   double loss = 0.0) {
  netpath::LinkSpec s;
  s.rate = netpath::RateTrace::constant(rate_bps);
  s.prop_delay = prop;
  s.queue_capacity = queue;
  s.loss_prob = loss;
  return s;
}

}  // namespace satdash::testing
