// SPDX-License-Identifier: Apache-2.0
#include "satdash/harness/simulation.hpp"

#include <memory>

#include "satdash/dash/client.hpp"
#include "satdash/dash/server.hpp"
#include "satdash/metrics/session.hpp"
#include "satdash/netpath/path.hpp"

namespace satdash::harness {
namespace {

// RNG substreams of one run.
constexpr std::uint64_t kPathStream = 1;
constexpr std::uint64_t kAccessJitterStream = 0x300;
constexpr std::uint64_t kServerCcStream = 0x1000;
constexpr std::uint64_t kClientCcStream = 0x2000;

constexpr std::uint32_t kTraceServer = transport::TransportTrace::bit(transport::TraceKind::RttSample);
constexpr std::uint32_t kTraceClient = transport::TransportTrace::bit(transport::TraceKind::Delivered);

netpath::RateTrace scaled(const netpath::RateTrace& trace, double factor) {
  std::vector<netpath::RateTrace::Point> pts = trace.points();
  for (auto& p : pts) p.rate_bps = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(p.rate_bps * factor)));
  return netpath::RateTrace(std::move(pts));
}

struct User {
  std::unique_ptr<transport::Connection> server_conn;
  std::unique_ptr<transport::Connection> client_conn;
  transport::TransportTrace server_trace{kTraceServer};
  transport::TransportTrace client_trace{kTraceClient};
  std::unique_ptr<dash::DashServer> server;
  std::unique_ptr<dash::DashClient> client;
};

void send_on(netpath::IabPath& path, engine::Simulator& sim, netpath::NodeId src, netpath::NodeId dst,
             std::shared_ptr<const transport::Datagram> d, std::uint32_t wire) {
  netpath::Packet pkt;
  pkt.size_bytes = wire;
  pkt.src = src;
  pkt.dst = dst;
  pkt.enqueue_time = sim.now();
  pkt.payload = std::move(d);
  path.send(std::move(pkt));
}

}  // namespace

SimulationResult run_simulation(const ScenarioConfig& cfg, const Cell& cell, std::uint64_t seed) {
  cfg.validate();
  engine::Simulator sim;
  const engine::SeededRng rng(seed);
  SimulationResult result;

  std::vector<netpath::LinkSpec> access_down, access_up;
  for (std::uint32_t i = 0; i < cfg.n_users; ++i) {
    engine::SeededRng jitter = rng.substream(kAccessJitterStream + i);
    const double factor = 1.0 + cfg.access_rate_jitter * (2.0 * jitter.uniform01() - 1.0);
    result.access_rate_factors.push_back(factor);
    netpath::LinkSpec down = cfg.path.access_down;
    netpath::LinkSpec up = cfg.path.access_up;
    down.rate = scaled(down.rate, factor);
    up.rate = scaled(up.rate, factor);
    access_down.push_back(std::move(down));
    access_up.push_back(std::move(up));
  }
  netpath::IabPath path(sim, cfg.path, std::move(access_down), std::move(access_up), rng.substream(kPathStream));

  const cc::CcParams params = cfg.cc_params();
  const dash::ClientConfig client_cfg = cfg.client_config();
  std::vector<User> users(cfg.n_users);
  std::uint32_t finished = 0;
  for (std::uint32_t i = 0; i < cfg.n_users; ++i) {
    User& u = users[i];
    const netpath::NodeId ue = netpath::IabPath::ue(i);
    u.server_conn = std::make_unique<transport::Connection>(
        sim, i, cell.mode, transport::Perspective::Server, cfg.transport,
        cc::make_controller(cell.algorithm, params, rng.substream(kServerCcStream + i)),
        [&path, &sim, ue](std::shared_ptr<const transport::Datagram> d, std::uint32_t wire) {
          send_on(path, sim, netpath::IabPath::kServer, ue, std::move(d), wire);
        });
    u.client_conn = std::make_unique<transport::Connection>(
        sim, i, cell.mode, transport::Perspective::Client, cfg.transport,
        cc::make_controller(cell.algorithm, params, rng.substream(kClientCcStream + i)),
        [&path, &sim, ue](std::shared_ptr<const transport::Datagram> d, std::uint32_t wire) {
          send_on(path, sim, ue, netpath::IabPath::kServer, std::move(d), wire);
        });
    u.server_conn->set_trace(&u.server_trace);
    u.client_conn->set_trace(&u.client_trace);
    u.server = std::make_unique<dash::DashServer>(*u.server_conn, cfg.manifest);
    u.client = std::make_unique<dash::DashClient>(sim, *u.client_conn, client_cfg);
    u.client->on_finished([&] {
      if (++finished == cfg.n_users) sim.stop();
    });
    path.attach(ue, [&u](netpath::Packet p) {
      u.client_conn->on_packet_received(static_cast<const transport::Datagram&>(*p.payload));
    });
  }
  path.attach(netpath::IabPath::kServer, [&users](netpath::Packet p) {
    const std::size_t user = p.src - netpath::IabPath::ue(0);
    users.at(user).server_conn->on_packet_received(static_cast<const transport::Datagram&>(*p.payload));
  });

  for (auto& u : users) u.client->start();
  sim.run_until(engine::at(cfg.session_limit));
  for (auto& u : users) u.client->finish();

  for (auto& u : users) {
    std::vector<transport::TransportEvent> events = u.server_trace.events();
    events.insert(events.end(), u.client_trace.events().begin(), u.client_trace.events().end());
    result.users.push_back(metrics::compute_session(u.client->log(), events, engine::kTimeZero, cfg.latency_warmup));
    result.playback_logs.push_back(u.client->log());
    result.server_stats.push_back(u.server_conn->stats());
  }
  result.fairness = metrics::compute_fairness(result.users);
  result.events = sim.executed();
  result.end_time = sim.now();
  return result;
}

}  // namespace satdash::harness
