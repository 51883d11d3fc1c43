#include "rlpr/routing_base.hpp"

#include <cmath>

namespace rlpr {

namespace {

constexpr double kReverseMaxAge = 30.0;

}  // namespace

std::string_view to_string(TimerKind kind) {
  switch (kind) {
    case TimerKind::Hello:
      return "hello";
    case TimerKind::NeighborExpiry:
      return "neighbor_expiry";
    case TimerKind::Contention:
      return "contention";
    case TimerKind::DiscoveryTimeout:
      return "discovery_timeout";
    case TimerKind::FloodRelay:
      return "flood_relay";
    case TimerKind::RarpWindow:
      return "rarp_window";
    case TimerKind::Holddown:
      return "holddown";
  }
  return "?";
}

RoutingBase::RoutingBase(const ScenarioConfig& cfg, NodeServices& services)
    : cfg_(cfg),
      svc_(services),
      self_(services.self()),
      dest_(cfg.destination),
      dest_pos_(cfg.destination_position()),
      range_(cfg.max_range),
      v_max_(cfg.v_max()),
      neighbors_(services.self()),
      seen_(cfg.dup_cache_size) {}

bool RoutingBase::may_transmit() const { return svc_.residual_energy() > 0.0; }

void RoutingBase::note(TraceEvent ev, std::string reason, std::optional<MsgKind> msg,
                       std::optional<DiscoveryTag> tag, double value, double cost, NodeId peer) {
  ProtocolNote n;
  n.ev = ev;
  n.reason = std::move(reason);
  n.msg = msg;
  n.tag = tag;
  n.value = value;
  n.cost = cost;
  n.peer = peer;
  svc_.record(n);
}

void RoutingBase::start() {
  // Random phase so beacons of different nodes do not align.
  svc_.start_timer(svc_.uniform(0.0, cfg_.hello_interval), {TimerKind::Hello, {}});
}

void RoutingBase::on_timer(TimerId id, const TimerTag& tag) {
  switch (tag.kind) {
    case TimerKind::Hello:
      hello_tick();
      return;
    case TimerKind::NeighborExpiry:
      expiry_timer_ = kNoTimer;
      expire_neighbors();
      return;
    case TimerKind::DiscoveryTimeout:
      discovery_timeout(tag);
      return;
    case TimerKind::Holddown:
      holddown_ = false;
      if (!buffer_.empty()) start_discovery();
      return;
    default:
      on_protocol_timer(id, tag);
  }
}

void RoutingBase::hello_tick() {
  if (hello_allowed()) send_hello(false);
  routes_.prune_reverse(svc_.now(), kReverseMaxAge);
  svc_.start_timer(cfg_.hello_interval, {TimerKind::Hello, {}});
}

void RoutingBase::send_hello(bool zoom_out) {
  HelloMessage h;
  h.sender_id = self_;
  h.position = svc_.position();
  h.speed = svc_.velocity().norm();
  h.residual_energy = svc_.residual_energy();
  h.distance_to_dest = distance(h.position, dest_pos_);
  h.timestamp = svc_.now();
  h.zoom_out = zoom_out;
  svc_.broadcast(h);
}

void RoutingBase::arm_expiry() {
  if (expiry_timer_ != kNoTimer) return;
  const auto next = neighbors_.next_expiry(cfg_.staleness_horizon());
  if (!next) return;
  expiry_timer_ = svc_.start_timer(std::max(0.0, *next - svc_.now()),
                                   {TimerKind::NeighborExpiry, {}});
}

void RoutingBase::expire_neighbors() {
  // The small slack absorbs rounding in the scheduled fire time.
  const auto lost = neighbors_.expire(svc_.now() + 1e-9, cfg_.staleness_horizon());
  if (!lost.empty()) {
    for (NodeId id : lost) routes_.invalidate_via(id);
    on_neighbors_lost(lost);
  }
  arm_expiry();
}

void RoutingBase::on_receive(const Packet& packet, NodeId from, double rssi) {
  if (const auto* h = std::get_if<HelloMessage>(&packet)) {
    handle_hello(*h, from);
  } else if (const auto* d = std::get_if<DataPacket>(&packet)) {
    handle_data(*d, from);
  } else if (const auto* e = std::get_if<RerrMessage>(&packet)) {
    handle_rerr(*e, from);
  } else {
    handle_control(packet, from, rssi);
  }
}

void RoutingBase::handle_hello(const HelloMessage& msg, NodeId from) {
  NeighborRecord rec;
  rec.id = from;
  rec.position = msg.position;
  rec.speed = msg.speed;
  rec.energy = msg.residual_energy;
  rec.last_heard = svc_.now();
  neighbors_.upsert(rec);
  on_neighbor_heard(rec);
  arm_expiry();
}

void RoutingBase::install_route(NodeId dest, NodeId next_hop, std::uint16_t hops) {
  routes_.set_forward(dest, {next_hop, hops, svc_.now() + cfg_.route_timeout});
}

void RoutingBase::on_data_generated(const DataPacket& packet) {
  if (!may_transmit()) {
    note(TraceEvent::Drop, "energy_gate", MsgKind::Data);
    return;
  }
  if (const auto* route = routes_.forward(packet.dest_id, svc_.now())) {
    send_data(packet, route->next_hop);
    return;
  }
  buffer_packet(packet);
  start_discovery();
}

void RoutingBase::buffer_packet(const DataPacket& pkt) {
  if (buffer_.size() >= cfg_.queue_length) {
    note(TraceEvent::Drop, "queue_full", MsgKind::Data);
    return;
  }
  buffer_.push_back(pkt);
}

void RoutingBase::send_data(DataPacket pkt, NodeId next_hop) {
  routes_.refresh_forward(pkt.dest_id, svc_.now() + cfg_.route_timeout);
  pkt.hop_count = static_cast<std::uint16_t>(pkt.hop_count + 1);
  svc_.unicast(pkt, next_hop);
}

void RoutingBase::handle_data(const DataPacket& pkt, NodeId from) {
  if (pkt.dest_id == self_) {
    note(TraceEvent::Deliver, {}, MsgKind::Data, std::nullopt, svc_.now() - pkt.created, kNoValue,
         pkt.source_id);
    return;
  }
  precursors_[{pkt.source_id, pkt.dest_id}] = from;
  const auto* route = routes_.forward(pkt.dest_id, svc_.now());
  if (!route) {
    note(TraceEvent::Drop, "no_route", MsgKind::Data);
    send_rerr(pkt.source_id, pkt.dest_id, self_);
    return;
  }
  send_data(pkt, route->next_hop);
}

void RoutingBase::send_rerr(NodeId source, NodeId dest, NodeId unreachable) {
  auto it = precursors_.find({source, dest});
  if (it == precursors_.end()) return;
  const NodeId back = it->second;
  precursors_.erase(it);
  svc_.unicast(RerrMessage{dest, source, unreachable}, back);
}

void RoutingBase::handle_rerr(const RerrMessage& msg, NodeId from) {
  if (const auto* route = routes_.forward(msg.dest_id, svc_.now());
      route && route->next_hop == from) {
    routes_.invalidate_forward(msg.dest_id);
  }
  if (msg.source_id == self_) return;
  send_rerr(msg.source_id, msg.dest_id, msg.unreachable_id);
}

void RoutingBase::on_unicast_result(const Packet& packet, NodeId to, bool delivered) {
  if (delivered) return;
  const auto* pkt = std::get_if<DataPacket>(&packet);
  if (!pkt) {
    note(TraceEvent::Drop, "link_failure", kind_of(packet), discovery_tag(packet), kNoValue,
         kNoValue, to);
    return;
  }
  routes_.invalidate_via(to);
  on_link_failure(to);
  if (pkt->source_id == self_) {
    DataPacket retry = *pkt;
    retry.hop_count = 0;
    buffer_.push_front(retry);
    if (buffer_.size() > cfg_.queue_length) {
      buffer_.pop_back();
      note(TraceEvent::Drop, "queue_full", MsgKind::Data);
    }
    start_discovery();
    return;
  }
  note(TraceEvent::Drop, "link_failure", MsgKind::Data, std::nullopt, kNoValue, kNoValue, to);
  send_rerr(pkt->source_id, pkt->dest_id, to);
}

void RoutingBase::start_discovery() {
  if (pending_ || holddown_ || buffer_.empty()) return;
  begin_attempt(0);
}

void RoutingBase::begin_attempt(std::uint32_t attempt) {
  const BroadcastId bid = ++next_bid_;
  const DiscoveryTag tag{self_, bid};
  note(TraceEvent::DiscStart, {}, std::nullopt, tag, kNoValue, kNoValue, dest_);
  PendingDiscovery p;
  p.bid = bid;
  p.attempt = attempt;
  p.timer = svc_.start_timer(cfg_.discovery_timeout * std::ldexp(1.0, static_cast<int>(attempt)),
                             {TimerKind::DiscoveryTimeout, key_for(self_, bid)});
  pending_ = p;
  send_request(bid);
}

void RoutingBase::discovery_timeout(const TimerTag& tag) {
  if (!pending_ || pending_->bid != tag.key.broadcast_id) return;
  note(TraceEvent::DiscEnd, "timeout", std::nullopt, DiscoveryTag{self_, pending_->bid}, 0.0);
  const auto attempt = pending_->attempt;
  pending_.reset();
  if (attempt < cfg_.discovery_retries) {
    begin_attempt(attempt + 1);
    return;
  }
  for (std::size_t i = 0; i < buffer_.size(); ++i) {
    note(TraceEvent::Drop, "no_route", MsgKind::Data);
  }
  buffer_.clear();
  holddown_ = true;
  svc_.start_timer(cfg_.discovery_holddown, {TimerKind::Holddown, {}});
}

void RoutingBase::complete_discovery(BroadcastId bid, NodeId next_hop, std::uint16_t hops) {
  install_route(dest_, next_hop, hops);
  if (pending_) {
    const bool current = pending_->bid == bid;
    note(TraceEvent::DiscEnd, current ? "" : "superseded", std::nullopt,
         DiscoveryTag{self_, pending_->bid}, current ? 1.0 : 0.0);
    svc_.cancel_timer(pending_->timer);
    pending_.reset();
  }
  flush_buffer();
}

void RoutingBase::flush_buffer() {
  while (!buffer_.empty()) {
    const auto* route = routes_.forward(dest_, svc_.now());
    if (!route) break;
    DataPacket pkt = buffer_.front();
    buffer_.pop_front();
    send_data(pkt, route->next_hop);
  }
}

void RoutingBase::relay_rrep(const RrepMessage& msg, NodeId from) {
  const auto hops = static_cast<std::uint16_t>(msg.hop_count + 1);
  if (msg.source_id == self_) {
    const auto* existing = routes_.forward(msg.dest_id, svc_.now());
    if (!discovery_pending() && existing && existing->hop_count <= hops) return;
    complete_discovery(msg.broadcast_id, from, hops);
    return;
  }
  const auto key = key_for(msg.source_id, msg.broadcast_id);
  const auto* rev = routes_.reverse(key);
  if (!rev) {
    note(TraceEvent::Anomaly, "orphan_reply", MsgKind::Rrep,
         DiscoveryTag{msg.source_id, msg.broadcast_id});
    return;
  }
  install_route(msg.dest_id, from, hops);
  RrepMessage next = msg;
  next.hop_count = static_cast<std::uint8_t>(std::min<int>(255, hops));
  next.next_hop_id = rev->predecessor;
  svc_.unicast(next, rev->predecessor);
}

}  // namespace rlpr
