// SPDX-License-Identifier: Apache-2.0
#include "satdash/netpath/path.hpp"

#include <stdexcept>
#include <string>

namespace satdash::netpath {

namespace {
// Substream ids for link loss RNGs.
constexpr std::uint64_t kBackhaulDownStream = 0x100;
constexpr std::uint64_t kBackhaulUpStream = 0x101;
constexpr std::uint64_t kAccessDownStream = 0x200;
constexpr std::uint64_t kAccessUpStream = 0x10200;
}  // namespace

void PathConfig::validate() const {
  backhaul_down.validate();
  backhaul_up.validate();
  access_down.validate();
  access_up.validate();
  if (mtu < 100) throw std::invalid_argument("PathConfig: mtu too small");
}

IabPath::IabPath(engine::Simulator& sim, const PathConfig& cfg, std::size_t n_users, const engine::SeededRng& rng)
    : IabPath(sim, cfg, std::vector<LinkSpec>(n_users, cfg.access_down), std::vector<LinkSpec>(n_users, cfg.access_up),
              rng) {}

IabPath::IabPath(engine::Simulator& sim, const PathConfig& cfg, std::vector<LinkSpec> access_down,
                 std::vector<LinkSpec> access_up, const engine::SeededRng& rng)
    : mtu_(cfg.mtu) {
  cfg.validate();
  if (access_down.size() != access_up.size()) throw std::invalid_argument("IabPath: access link count mismatch");
  backhaul_down_ = std::make_unique<Link>(sim, cfg.backhaul_down, rng.substream(kBackhaulDownStream), "backhaul_down");
  backhaul_up_ = std::make_unique<Link>(sim, cfg.backhaul_up, rng.substream(kBackhaulUpStream), "backhaul_up");
  backhaul_down_->set_receiver([this](Packet p) { relay(std::move(p)); });
  backhaul_up_->set_receiver([this](Packet p) { deliver(std::move(p)); });
  for (std::size_t i = 0; i < access_down.size(); ++i) {
    auto down = std::make_unique<Link>(sim, std::move(access_down[i]), rng.substream(kAccessDownStream + i),
                                       "access_down_" + std::to_string(i));
    auto up = std::make_unique<Link>(sim, std::move(access_up[i]), rng.substream(kAccessUpStream + i),
                                     "access_up_" + std::to_string(i));
    down->set_receiver([this](Packet p) { deliver(std::move(p)); });
    up->set_receiver([this](Packet p) { relay(std::move(p)); });
    access_down_.push_back(std::move(down));
    access_up_.push_back(std::move(up));
  }
  receivers_.resize(2 + access_down_.size());
}

void IabPath::attach(NodeId node, Receiver r) {
  if (node == kIab || node >= receivers_.size()) throw std::invalid_argument("IabPath::attach: bad node");
  receivers_[node] = std::move(r);
}

std::size_t IabPath::user_of(NodeId node) const {
  if (node < 2 || node >= receivers_.size()) throw std::invalid_argument("IabPath: unknown UE node " + std::to_string(node));
  return node - 2;
}

TransmitOutcome IabPath::send(Packet pkt) {
  if (pkt.size_bytes == 0 || pkt.size_bytes > mtu_) {
    throw std::invalid_argument("IabPath::send: packet size " + std::to_string(pkt.size_bytes) + " outside (0, MTU]");
  }
  if (pkt.src == kServer) {
    user_of(pkt.dst);
    return backhaul_down_->transmit(std::move(pkt));
  }
  if (pkt.dst != kServer) throw std::invalid_argument("IabPath::send: UE packets must go to the server");
  const std::size_t u = user_of(pkt.src);
  return access_up_[u]->transmit(std::move(pkt));
}

TransmitOutcome IabPath::relay(Packet pkt) {
  if (pkt.dst == kServer) return backhaul_up_->transmit(std::move(pkt));
  return access_down_[user_of(pkt.dst)]->transmit(std::move(pkt));
}

void IabPath::deliver(Packet pkt) {
  auto& r = receivers_.at(pkt.dst);
  if (r) r(std::move(pkt));
}

}  // namespace satdash::netpath
