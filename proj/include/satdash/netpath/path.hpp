// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "satdash/netpath/link.hpp"

namespace satdash::netpath {

/// Link budget of the relayed path, abstracted to rate, delay and loss.
/// The backhaul (server <-> IAB over the satellite) is shared by every user;
/// each user has its own access link to the IAB node.
struct PathConfig {
  LinkSpec backhaul_down;
  LinkSpec backhaul_up;
  LinkSpec access_down;
  LinkSpec access_up;
  std::uint32_t mtu = kDefaultMtu;

  void validate() const;
};

enum class Direction { Down, Up };

/// Server, one IAB relay, and N user equipments.
///
///   server --backhaul_down--> IAB --access_down[i]--> UE i
///   UE i  --access_up[i]-->   IAB --backhaul_up-->    server
class IabPath {
 public:
  using Receiver = std::function<void(Packet)>;

  /// Builds one access link pair per entry of `access_down` / `access_up`
  /// (same length). Every link draws losses from its own RNG substream.
  IabPath(engine::Simulator& sim, const PathConfig& cfg, std::vector<LinkSpec> access_down,
          std::vector<LinkSpec> access_up, const engine::SeededRng& rng);
  /// Same access spec for all `n_users`.
  IabPath(engine::Simulator& sim, const PathConfig& cfg, std::size_t n_users, const engine::SeededRng& rng);

  static constexpr NodeId kServer = 0;
  static constexpr NodeId kIab = 1;
  static NodeId ue(std::size_t user) { return static_cast<NodeId>(2 + user); }

  std::size_t n_users() const { return access_down_.size(); }

  void attach(NodeId node, Receiver r);

  /// Injects a packet at its source node. The size must not exceed the MTU.
  TransmitOutcome send(Packet pkt);

  /// Forwards a packet that arrived at the IAB node onto the next hop,
  /// unmodified, at the current time.
  TransmitOutcome relay(Packet pkt);

  Link& backhaul(Direction d) { return d == Direction::Down ? *backhaul_down_ : *backhaul_up_; }
  Link& access(std::size_t user, Direction d) {
    return d == Direction::Down ? *access_down_.at(user) : *access_up_.at(user);
  }

  std::uint32_t mtu() const { return mtu_; }

 private:
  void deliver(Packet pkt);
  std::size_t user_of(NodeId node) const;

  std::uint32_t mtu_;
  std::unique_ptr<Link> backhaul_down_;
  std::unique_ptr<Link> backhaul_up_;
  std::vector<std::unique_ptr<Link>> access_down_;
  std::vector<std::unique_ptr<Link>> access_up_;
  std::vector<Receiver> receivers_;
};

}  // namespace satdash::netpath
