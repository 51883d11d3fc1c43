#include "rlpr/rlpr_node.hpp"

#include <algorithm>

namespace rlpr {

RlprNode::RlprNode(const ScenarioConfig& cfg, NodeServices& services)
    : RoutingBase(cfg, services), zone_(cfg.zone()), contention_cfg_(cfg.contention()) {}

bool RlprNode::may_transmit() const {
  return svc_.residual_energy() >= zone_.energy_threshold;
}

RlrqMessage RlprNode::make_rlrq(NodeId source, BroadcastId bid, std::uint16_t hops) const {
  RlrqMessage m;
  m.source_id = source;
  m.dest_id = dest_;
  m.broadcast_id = bid;
  m.prev_hop_id = self_;
  m.prev_hop_position = svc_.position();
  m.prev_hop_speed = svc_.velocity().norm();
  m.front_relatives = front_.members();
  m.hop_count = hops;
  return m;
}

void RlprNode::send_request(BroadcastId bid) {
  seen_.insert(key_for(self_, bid));
  svc_.broadcast(make_rlrq(self_, bid, 0));
}

void RlprNode::on_neighbor_heard(const NeighborRecord& rec) {
  bool member = false;
  try {
    const double angle = forwarding_angle(svc_.position(), rec.position, dest_pos_);
    member = in_forwarding_zone(angle, rec.energy, zone_);
  } catch (const DegenerateGeometry&) {
    member = false;
  }
  front_.set(rec.id, member);
}

void RlprNode::on_neighbors_lost(const std::vector<NodeId>&) {
  front_.retain(neighbors_);
  trigger_zoom_out();
}

void RlprNode::on_link_failure(NodeId) { trigger_zoom_out(); }

void RlprNode::trigger_zoom_out() {
  if (may_transmit()) send_hello(true);
}

void RlprNode::handle_control(const Packet& packet, NodeId from, double rssi) {
  if (const auto* q = std::get_if<RlrqMessage>(&packet)) {
    on_rlrq(*q, from, rssi);
  } else if (const auto* p = std::get_if<RlrpMessage>(&packet)) {
    on_rlrp(*p, from);
  } else {
    note(TraceEvent::Drop, "foreign_protocol", kind_of(packet));
  }
}

RlrqDecision RlprNode::on_rlrq(const RlrqMessage& msg, NodeId from, double rssi) {
  const DiscoveryKey key{msg.source_id, msg.dest_id, msg.broadcast_id};
  const DiscoveryTag tag{msg.source_id, msg.broadcast_id};

  if (!may_transmit()) {
    note(TraceEvent::Drop, "energy_gate", MsgKind::Rlrq, tag);
    return RlrqDecision::BelowThreshold;
  }

  if (seen_.contains(key)) {
    bool cancelled = false;
    if (auto it = contention_.find(key); it != contention_.end()) {
      svc_.cancel_timer(it->second.timer);
      contention_.erase(it);
      cancelled = true;
    }
    cancelled = svc_.cancel_queued(key) || cancelled;
    if (cancelled) {
      note(TraceEvent::ContCancel, {}, MsgKind::Rlrq, tag, kNoValue, kNoValue, from);
    }
    note(TraceEvent::Drop, "duplicate", MsgKind::Rlrq, tag);
    return RlrqDecision::Duplicate;
  }

  const bool has_route = routes_.forward(msg.dest_id, svc_.now()) != nullptr;
  if (msg.dest_id == self_ || has_route) {
    seen_.insert(key);
    routes_.set_reverse(key, {from, static_cast<std::uint16_t>(msg.hop_count + 1), svc_.now()});
    svc_.unicast(RlrpMessage{msg.source_id, msg.dest_id, msg.broadcast_id, from}, from);
    return RlrqDecision::Reply;
  }

  if (std::find(msg.front_relatives.begin(), msg.front_relatives.end(), self_) ==
      msg.front_relatives.end()) {
    note(TraceEvent::Drop, "not_front_relative", MsgKind::Rlrq, tag);
    return RlrqDecision::NotFrontRelative;
  }

  if (rssi < cfg_.rlrq_rssi_threshold) {
    note(TraceEvent::Drop, "weak_signal", MsgKind::Rlrq, tag);
    return RlrqDecision::WeakSignal;
  }

  const Position here = svc_.position();
  const double vrl =
      relative_speed_metric(msg.prev_hop_speed, svc_.velocity().norm(), v_max_);
  const double gd = geographic_distance_metric(distance(msg.prev_hop_position, dest_pos_),
                                               distance(here, dest_pos_), range_);
  const double metric = composite_metric(gd, vrl, cfg_.alpha, cfg_.beta);
  const double delay = contention_delay(metric, self_, contention_cfg_);

  seen_.insert(key);
  routes_.set_reverse(key, {from, static_cast<std::uint16_t>(msg.hop_count + 1), svc_.now()});
  Contention c;
  c.cached = msg;
  c.timer = svc_.start_timer(delay, {TimerKind::Contention, key});
  contention_[key] = std::move(c);
  note(TraceEvent::ContSched, {}, MsgKind::Rlrq, tag, metric, delay, from);
  return RlrqDecision::Contend;
}

void RlprNode::on_protocol_timer(TimerId, const TimerTag& tag) {
  if (tag.kind == TimerKind::Contention) fire_contention(tag.key);
}

void RlprNode::fire_contention(const DiscoveryKey& key) {
  auto it = contention_.find(key);
  if (it == contention_.end()) return;
  const RlrqMessage cached = std::move(it->second.cached);
  contention_.erase(it);
  FrameOptions opts;
  opts.suppress_key = key;
  opts.immediate = true;
  svc_.broadcast(make_rlrq(cached.source_id, cached.broadcast_id,
                           static_cast<std::uint16_t>(cached.hop_count + 1)),
                 opts);
}

void RlprNode::on_rlrp(const RlrpMessage& msg, NodeId from) {
  const DiscoveryKey key{msg.source_id, msg.dest_id, msg.broadcast_id};
  if (msg.source_id == self_) {
    complete_discovery(msg.broadcast_id, from, 0);
    return;
  }
  const auto* rev = routes_.reverse(key);
  if (!rev) {
    note(TraceEvent::Anomaly, "orphan_reply", MsgKind::Rlrp,
         DiscoveryTag{msg.source_id, msg.broadcast_id});
    return;
  }
  install_route(msg.dest_id, from, 0);
  svc_.unicast(RlrpMessage{msg.source_id, msg.dest_id, msg.broadcast_id, rev->predecessor},
               rev->predecessor);
}

}  // namespace rlpr
