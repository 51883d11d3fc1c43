#pragma once

#include <limits>
#include <map>
#include <vector>

#include "rlpr/routing_base.hpp"

namespace rlpr {

/// Flooding on-demand routing: every first-time receiver rebroadcasts the
/// request after a short jitter; the destination or any node holding a valid
/// route replies; the source keeps the fewest-hop reply.
class AodvNode : public RoutingBase {
 public:
  AodvNode(const ScenarioConfig& cfg, NodeServices& services);

 protected:
  void send_request(BroadcastId bid) override;
  void handle_control(const Packet& packet, NodeId from, double rssi) override;
  void on_protocol_timer(TimerId id, const TimerTag& tag) override;

 private:
  void on_rreq(const RreqMessage& msg, NodeId from);

  std::map<TimerId, RreqMessage> relays_;
};

struct Kinematics {
  Position position;
  Velocity velocity;
};

/// Seconds until two nodes moving at constant velocity drift further than
/// `range` apart. Infinity if they never do, 0 if already out of range.
double expected_connection_time(const Kinematics& a, const Kinematics& b, double range);

struct RarpWeights {
  double ect_cap = 60.0;       // seconds treated as "stable enough"
  double hop_penalty = 0.05;   // utility lost per hop
  double energy_weight = 1.0;
  double energy_scale = 100.0;  // joules mapped to 1.0
};

struct RouteOffer {
  NodeId last_hop = kNoNode;
  double min_ect = 0.0;
  std::uint32_t hops = 0;
  double min_energy = std::numeric_limits<double>::infinity();  // no relays: +inf
};

/// min(ect, cap) / cap + energy_weight * min(e, scale) / scale - hop_penalty * hops,
/// where e is the weakest relay residual.
double rarp_utility(const RouteOffer& offer, const RarpWeights& w);

/// Index of the best offer (highest utility, earliest on ties), or nullopt.
std::optional<std::size_t> best_offer(const std::vector<RouteOffer>& offers,
                                      const RarpWeights& w);

/// Omni-directional simplification of the risk-aware protocol: requests flood
/// like AODV while accumulating the weakest-link connection time; only the
/// destination answers, once, after collecting offers for a fixed window.
class RarpLiteNode : public RoutingBase {
 public:
  RarpLiteNode(const ScenarioConfig& cfg, NodeServices& services);

 protected:
  void send_request(BroadcastId bid) override;
  void handle_control(const Packet& packet, NodeId from, double rssi) override;
  void on_protocol_timer(TimerId id, const TimerTag& tag) override;

 private:
  void on_request(const RarpRequest& msg, NodeId from);
  void close_window(const DiscoveryKey& key);

  RarpWeights weights_;
  std::map<TimerId, RarpRequest> relays_;
  std::map<DiscoveryKey, std::vector<RouteOffer>> offers_;
};

}  // namespace rlpr
