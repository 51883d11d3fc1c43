#include "rlpr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rlpr {

AodvNode::AodvNode(const ScenarioConfig& cfg, NodeServices& services)
    : RoutingBase(cfg, services) {}

void AodvNode::send_request(BroadcastId bid) {
  seen_.insert(key_for(self_, bid));
  RreqMessage m;
  m.broadcast_id = bid;
  m.dest_id = dest_;
  m.source_id = self_;
  m.source_seq = bid;
  svc_.broadcast(m);
}

void AodvNode::handle_control(const Packet& packet, NodeId from, double) {
  if (const auto* q = std::get_if<RreqMessage>(&packet)) {
    on_rreq(*q, from);
  } else if (const auto* p = std::get_if<RrepMessage>(&packet)) {
    relay_rrep(*p, from);
  } else {
    note(TraceEvent::Drop, "foreign_protocol", kind_of(packet));
  }
}

void AodvNode::on_rreq(const RreqMessage& msg, NodeId from) {
  const DiscoveryKey key{msg.source_id, msg.dest_id, msg.broadcast_id};
  if (!seen_.insert(key)) {
    note(TraceEvent::Drop, "duplicate", MsgKind::Rreq, DiscoveryTag{msg.source_id, msg.broadcast_id});
    return;
  }
  const auto hops = static_cast<std::uint16_t>(msg.hop_count + 1);
  routes_.set_reverse(key, {from, hops, svc_.now()});

  RrepMessage reply;
  reply.dest_id = msg.dest_id;
  reply.source_id = msg.source_id;
  reply.broadcast_id = msg.broadcast_id;
  reply.next_hop_id = from;
  if (msg.dest_id == self_) {
    svc_.unicast(reply, from);
    return;
  }
  if (const auto* route = routes_.forward(msg.dest_id, svc_.now())) {
    reply.hop_count = static_cast<std::uint8_t>(std::min<int>(255, route->hop_count));
    svc_.unicast(reply, from);
    return;
  }
  RreqMessage next = msg;
  next.hop_count = static_cast<std::uint8_t>(std::min<int>(255, hops));
  const TimerId id = svc_.start_timer(svc_.uniform(0.0, cfg_.flood_jitter),
                                      {TimerKind::FloodRelay, key});
  relays_[id] = next;
}

void AodvNode::on_protocol_timer(TimerId id, const TimerTag& tag) {
  if (tag.kind != TimerKind::FloodRelay) return;
  auto it = relays_.find(id);
  if (it == relays_.end()) return;
  const RreqMessage msg = it->second;
  relays_.erase(it);
  svc_.broadcast(msg);
}

double expected_connection_time(const Kinematics& a, const Kinematics& b, double range) {
  const Vec2 d = b.position - a.position;
  const Vec2 v = b.velocity - a.velocity;
  const double c = d.dot(d) - range * range;
  if (c > 0.0) return 0.0;
  const double qa = v.dot(v);
  if (qa == 0.0) return std::numeric_limits<double>::infinity();
  const double qb = 2.0 * d.dot(v);
  // c <= 0 guarantees a real, non-negative larger root.
  const double disc = qb * qb - 4.0 * qa * c;
  return (-qb + std::sqrt(std::max(0.0, disc))) / (2.0 * qa);
}

double rarp_utility(const RouteOffer& offer, const RarpWeights& w) {
  return std::min(offer.min_ect, w.ect_cap) / w.ect_cap +
         w.energy_weight * std::min(offer.min_energy, w.energy_scale) / w.energy_scale -
         w.hop_penalty * static_cast<double>(offer.hops);
}

std::optional<std::size_t> best_offer(const std::vector<RouteOffer>& offers,
                                      const RarpWeights& w) {
  std::optional<std::size_t> best;
  double best_u = 0.0;
  for (std::size_t i = 0; i < offers.size(); ++i) {
    const double u = rarp_utility(offers[i], w);
    if (!best || u > best_u) {
      best = i;
      best_u = u;
    }
  }
  return best;
}

RarpLiteNode::RarpLiteNode(const ScenarioConfig& cfg, NodeServices& services)
    : RoutingBase(cfg, services),
      weights_{cfg.rarp_ect_cap, cfg.rarp_hop_penalty, cfg.rarp_energy_weight, cfg.energy_max} {}

void RarpLiteNode::send_request(BroadcastId bid) {
  seen_.insert(key_for(self_, bid));
  RarpRequest m;
  m.broadcast_id = bid;
  m.dest_id = dest_;
  m.source_id = self_;
  m.min_ect = std::numeric_limits<double>::infinity();
  m.min_energy = std::numeric_limits<double>::infinity();
  m.prev_position = svc_.position();
  m.prev_velocity = svc_.velocity();
  svc_.broadcast(m);
}

void RarpLiteNode::handle_control(const Packet& packet, NodeId from, double) {
  if (const auto* q = std::get_if<RarpRequest>(&packet)) {
    on_request(*q, from);
  } else if (const auto* p = std::get_if<RrepMessage>(&packet)) {
    relay_rrep(*p, from);
  } else {
    note(TraceEvent::Drop, "foreign_protocol", kind_of(packet));
  }
}

void RarpLiteNode::on_request(const RarpRequest& msg, NodeId from) {
  const DiscoveryKey key{msg.source_id, msg.dest_id, msg.broadcast_id};
  const DiscoveryTag tag{msg.source_id, msg.broadcast_id};
  const double link = expected_connection_time({msg.prev_position, msg.prev_velocity},
                                               {svc_.position(), svc_.velocity()}, range_);
  const double min_ect = std::min(msg.min_ect, link);
  const auto hops = static_cast<std::uint32_t>(msg.hop_count) + 1;

  if (msg.dest_id == self_) {
    auto& bucket = offers_[key];
    if (bucket.empty()) {
      if (!seen_.insert(key)) {
        note(TraceEvent::Drop, "late_offer", MsgKind::Rreq, tag);
        offers_.erase(key);
        return;
      }
      svc_.start_timer(cfg_.rarp_window, {TimerKind::RarpWindow, key});
    }
    bucket.push_back({from, min_ect, hops, msg.min_energy});
    return;
  }

  if (!seen_.insert(key)) {
    note(TraceEvent::Drop, "duplicate", MsgKind::Rreq, tag);
    return;
  }
  routes_.set_reverse(key, {from, static_cast<std::uint16_t>(hops), svc_.now()});
  RarpRequest next = msg;
  next.hop_count = static_cast<std::uint8_t>(std::min<std::uint32_t>(255, hops));
  next.min_ect = min_ect;
  // Energy-poor relays hold back so offers through richer nodes arrive first.
  const double risk = 1.0 - std::min(svc_.residual_energy(), cfg_.energy_max) / cfg_.energy_max;
  const double delay = cfg_.flood_jitter * (svc_.uniform(0.0, 1.0) + cfg_.rarp_risk_delay * risk);
  const TimerId id = svc_.start_timer(delay, {TimerKind::FloodRelay, key});
  relays_[id] = next;
}

void RarpLiteNode::on_protocol_timer(TimerId id, const TimerTag& tag) {
  if (tag.kind == TimerKind::RarpWindow) {
    close_window(tag.key);
    return;
  }
  if (tag.kind != TimerKind::FloodRelay) return;
  auto it = relays_.find(id);
  if (it == relays_.end()) return;
  RarpRequest msg = it->second;
  relays_.erase(it);
  // Kinematics are sampled when the frame is handed to the MAC.
  msg.prev_position = svc_.position();
  msg.prev_velocity = svc_.velocity();
  msg.min_energy = std::min(msg.min_energy, svc_.residual_energy());
  svc_.broadcast(msg);
}

void RarpLiteNode::close_window(const DiscoveryKey& key) {
  auto it = offers_.find(key);
  if (it == offers_.end()) return;
  const auto offers = std::move(it->second);
  offers_.erase(it);
  const auto pick = best_offer(offers, weights_);
  if (!pick) return;
  const RouteOffer& o = offers[*pick];
  routes_.set_reverse(key, {o.last_hop, static_cast<std::uint16_t>(o.hops), svc_.now()});
  note(TraceEvent::Timer, "rarp_choice", MsgKind::Rrep,
       DiscoveryTag{key.source, key.broadcast_id},
       rarp_utility(o, weights_), static_cast<double>(offers.size()), o.last_hop);
  RrepMessage reply;
  reply.dest_id = self_;
  reply.source_id = key.source;
  reply.broadcast_id = key.broadcast_id;
  reply.next_hop_id = o.last_hop;
  svc_.unicast(reply, o.last_hop);
}

}  // namespace rlpr
