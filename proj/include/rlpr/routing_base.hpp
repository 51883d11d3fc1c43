#pragma once

#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "rlpr/protocol.hpp"

namespace rlpr {

/// Machinery shared by every routing protocol: HELLO beaconing and the
/// neighbor table, forward routes with timeouts, the source-side data buffer,
/// discovery retries with holddown, data relaying and RERR propagation.
class RoutingBase : public RoutingProtocol {
 public:
  RoutingBase(const ScenarioConfig& cfg, NodeServices& services);

  void start() override;
  void on_timer(TimerId id, const TimerTag& tag) override;
  void on_receive(const Packet& packet, NodeId from, double rssi) override;
  void on_unicast_result(const Packet& packet, NodeId to, bool delivered) override;
  void on_data_generated(const DataPacket& packet) override;
  bool may_transmit() const override;

  const NeighborTable& neighbors() const { return neighbors_; }
  const RouteTables& routes() const { return routes_; }
  std::size_t buffered() const { return buffer_.size(); }
  BroadcastId last_broadcast_id() const { return next_bid_; }
  bool discovery_pending() const { return pending_.has_value(); }

 protected:
  /// Broadcasts the protocol's route request for a fresh broadcast id.
  virtual void send_request(BroadcastId bid) = 0;
  /// Route requests and replies.
  virtual void handle_control(const Packet& packet, NodeId from, double rssi) = 0;
  virtual void on_protocol_timer(TimerId, const TimerTag&) {}
  virtual void on_neighbor_heard(const NeighborRecord&) {}
  virtual void on_neighbors_lost(const std::vector<NodeId>&) {}
  virtual void on_link_failure(NodeId) {}
  virtual bool hello_allowed() const { return may_transmit(); }

  void send_hello(bool zoom_out);
  void install_route(NodeId dest, NodeId next_hop, std::uint16_t hops);
  /// Called at the source when a reply for `bid` arrives through `next_hop`.
  void complete_discovery(BroadcastId bid, NodeId next_hop, std::uint16_t hops);
  /// Relays an RREP one hop toward the source along the reverse entry, or
  /// finishes the discovery when this node is the source.
  void relay_rrep(const RrepMessage& msg, NodeId from);
  void note(TraceEvent ev, std::string reason, std::optional<MsgKind> msg = std::nullopt,
            std::optional<DiscoveryTag> tag = std::nullopt, double value = kNoValue,
            double cost = kNoValue, NodeId peer = kNoNode);
  DiscoveryKey key_for(NodeId source, BroadcastId bid) const { return {source, dest_, bid}; }

  const ScenarioConfig& cfg_;
  NodeServices& svc_;
  NodeId self_;
  NodeId dest_;
  Position dest_pos_;
  double range_;
  double v_max_;
  NeighborTable neighbors_;
  RouteTables routes_;
  DuplicateCache seen_;

 private:
  struct PendingDiscovery {
    BroadcastId bid = 0;
    std::uint32_t attempt = 0;
    TimerId timer = kNoTimer;
  };

  void hello_tick();
  void arm_expiry();
  void expire_neighbors();
  void handle_hello(const HelloMessage& msg, NodeId from);
  void handle_data(const DataPacket& pkt, NodeId from);
  void handle_rerr(const RerrMessage& msg, NodeId from);
  void send_data(DataPacket pkt, NodeId next_hop);
  void buffer_packet(const DataPacket& pkt);
  void start_discovery();
  void begin_attempt(std::uint32_t attempt);
  void discovery_timeout(const TimerTag& tag);
  void flush_buffer();
  void send_rerr(NodeId source, NodeId dest, NodeId unreachable);

  std::deque<DataPacket> buffer_;
  std::optional<PendingDiscovery> pending_;
  bool holddown_ = false;
  BroadcastId next_bid_ = 0;
  TimerId expiry_timer_ = kNoTimer;
  // (source, destination) -> node that handed us data for that flow.
  std::map<std::pair<NodeId, NodeId>, NodeId> precursors_;
};

}  // namespace rlpr
