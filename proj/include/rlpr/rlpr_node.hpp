#pragma once

#include <map>
#include <set>

#include "rlpr/routing_base.hpp"
#include "rlpr/routing_metrics.hpp"

namespace rlpr {

/// Outcome of the ordered RLRQ gates.
enum class RlrqDecision {
  BelowThreshold,     // own energy under T_E
  Duplicate,
  Reply,              // destination, or holder of a valid route
  NotFrontRelative,
  WeakSignal,
  Contend,
};

class RlprNode : public RoutingBase {
 public:
  RlprNode(const ScenarioConfig& cfg, NodeServices& services);

  /// Participation gate: E_i >= T_E.
  bool may_transmit() const override;

  const FrontRelativeTable& front_relatives() const { return front_; }
  std::size_t pending_contentions() const { return contention_.size(); }

 protected:
  void send_request(BroadcastId bid) override;
  void handle_control(const Packet& packet, NodeId from, double rssi) override;
  void on_protocol_timer(TimerId id, const TimerTag& tag) override;
  void on_neighbor_heard(const NeighborRecord& rec) override;
  void on_neighbors_lost(const std::vector<NodeId>& lost) override;
  void on_link_failure(NodeId next_hop) override;

 private:
  struct Contention {
    TimerId timer = kNoTimer;
    RlrqMessage cached;
  };

  RlrqMessage make_rlrq(NodeId source, BroadcastId bid, std::uint16_t hops) const;
  RlrqDecision on_rlrq(const RlrqMessage& msg, NodeId from, double rssi);
  void on_rlrp(const RlrpMessage& msg, NodeId from);
  void fire_contention(const DiscoveryKey& key);
  void trigger_zoom_out();

  ZoneConfig zone_;
  ContentionConfig contention_cfg_;
  FrontRelativeTable front_;
  std::map<DiscoveryKey, Contention> contention_;
};

}  // namespace rlpr
