#include "rlpr/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace rlpr {

namespace {

constexpr std::size_t kMacQueueLimit = 64;
// Co-located nodes still need a finite path loss.
constexpr double kMinDistance = 1e-3;

std::string format_position(Position p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f,%.3f", p.x, p.y);
  return buf;
}

}  // namespace

double frame_airtime(const ScenarioConfig& cfg, std::size_t net_bytes) {
  return cfg.preamble +
         static_cast<double>((net_bytes + cfg.mac_overhead_bytes) * 8) / cfg.data_rate;
}

struct Simulation::Node {
  Node(NodeId id_, std::uint64_t seed)
      : id(id_),
        mac_rng(seed, Stream::Mac, id_),
        proto_rng(seed, Stream::Protocol, id_),
        mob_rng(seed, Stream::Mobility, id_),
        traffic_rng(seed, Stream::Traffic, id_) {}

  NodeId id;
  MobilityState mob;
  double mob_time = 0.0;
  std::uint64_t mob_gen = 0;

  EnergyBudget energy;
  double energy_time = 0.0;
  bool alive = true;
  std::uint64_t death_gen = 0;

  std::deque<std::shared_ptr<Frame>> mac_queue;
  bool mac_active = false;
  double tx_until = -1.0;
  double busy_until = -1.0;
  std::vector<Reception> rx;

  SeededGenerator mac_rng;
  SeededGenerator proto_rng;
  SeededGenerator mob_rng;
  SeededGenerator traffic_rng;

  std::unique_ptr<Services> services;
  std::unique_ptr<RoutingProtocol> proto;
  std::uint32_t data_seq = 0;
};

class Simulation::Services : public NodeServices {
 public:
  Services(Simulation& sim, NodeId id) : sim_(sim), id_(id) {}

  NodeId self() const override { return id_; }
  double now() const override { return sim_.now_; }
  Position position() const override { return sim_.position_of(id_); }
  Velocity velocity() const override { return sim_.nodes_[id_]->mob.velocity(); }
  double residual_energy() const override { return sim_.current_energy(*sim_.nodes_[id_]); }

  void broadcast(Packet packet, FrameOptions opts) override {
    send(std::move(packet), kNoNode, std::move(opts));
  }
  void unicast(Packet packet, NodeId to, FrameOptions opts) override {
    send(std::move(packet), to, std::move(opts));
  }
  bool cancel_queued(const DiscoveryKey& key) override { return sim_.cancel_queued(id_, key); }

  TimerId start_timer(double delay, TimerTag tag) override {
    const TimerId id = sim_.next_timer_++;
    sim_.timers_.emplace(id, std::make_pair(id_, tag));
    sim_.schedule(sim_.now_ + delay, EventType::Timer, id_, id);
    return id;
  }
  void cancel_timer(TimerId id) override { sim_.timers_.erase(id); }

  double uniform(double lo, double hi) override {
    return sim_.nodes_[id_]->proto_rng.uniform(lo, hi);
  }

  void record(const ProtocolNote& note) override {
    TraceRecord r;
    r.node = id_;
    r.ev = note.ev;
    r.msg = note.msg;
    r.peer = note.peer;
    if (note.tag) {
      r.src = note.tag->source;
      r.bid = note.tag->broadcast_id;
    }
    r.value = note.value;
    r.cost = note.cost;
    r.reason = note.reason;
    sim_.emit(std::move(r));
  }

 private:
  void send(Packet packet, NodeId to, FrameOptions opts) {
    auto f = std::make_shared<Frame>();
    f->id = sim_.next_frame_++;
    f->sender = id_;
    f->target = to;
    f->net_bytes = wire_size(packet);
    f->packet = std::move(packet);
    f->opts = std::move(opts);
    sim_.enqueue(id_, std::move(f));
  }

  Simulation& sim_;
  NodeId id_;
};

Simulation::Simulation(ScenarioConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), seed_(seed), mobility_(cfg_.mobility()), radio_(cfg_.radio()) {
  validate(cfg_);
  const auto sources = cfg_.source_ids();
  nodes_.reserve(cfg_.node_count);
  for (NodeId id = 0; id < cfg_.node_count; ++id) {
    auto n = std::make_unique<Node>(id, seed_);
    SeededGenerator setup(seed_, Stream::Setup, id);

    n->energy.tx_cost_per_bit = cfg_.tx_cost_per_bit;
    n->energy.rx_cost_per_bit = cfg_.rx_cost_per_bit;
    n->energy.idle_drain = cfg_.idle_drain;
    n->energy.residual = setup.uniform(cfg_.energy_min, cfg_.energy_max);
    if (!cfg_.energies.empty()) n->energy.residual = cfg_.energies[id];

    if (id == cfg_.destination) {
      n->energy.unlimited = cfg_.dest_unlimited_energy;
      if (n->energy.unlimited && cfg_.energies.empty()) n->energy.residual = cfg_.energy_max;
      n->mob.position = cfg_.destination_position();
      n->mob.waypoint = n->mob.position;
      n->mob.stationary = true;
    } else if (!cfg_.positions.empty()) {
      n->mob.position = cfg_.positions[id];
      if (cfg_.static_nodes) {
        n->mob.waypoint = n->mob.position;
        n->mob.stationary = true;
      } else {
        draw_leg(n->mob, mobility_, n->mob_rng);
      }
    } else {
      n->mob = initial_mobility(mobility_, n->mob_rng);
      if (cfg_.static_nodes) {
        n->mob.waypoint = n->mob.position;
        n->mob.stationary = true;
      }
    }
    nodes_.push_back(std::move(n));
  }

  for (auto& n : nodes_) {
    n->services = std::make_unique<Services>(*this, n->id);
    n->proto = make_protocol(cfg_.protocol, cfg_, *n->services);
  }

  for (auto& n : nodes_) {
    TraceRecord r;
    r.node = n->id;
    r.ev = TraceEvent::Init;
    r.energy = n->energy.residual;
    r.value = n->energy.unlimited ? 1.0 : 0.0;
    r.detail = format_position(n->mob.position);
    emit(std::move(r));
  }
  for (auto& n : nodes_) {
    schedule_transition(n->id);
    reschedule_death(n->id);
    n->proto->start();
  }
  for (NodeId s : sources) {
    auto& n = *nodes_[s];
    schedule(cfg_.traffic_start + n.traffic_rng.uniform(0.0, cfg_.cbr_interval),
             EventType::Traffic, s);
  }
}

Simulation::~Simulation() = default;

void Simulation::schedule(double t, EventType type, NodeId node, std::uint64_t ref) {
  if (t < now_) throw std::logic_error("simulation: event scheduled in the past");
  queue_.push(Event{t, next_seq_++, type, node, ref});
}

void Simulation::emit(TraceRecord rec) {
  if (cfg_.trace_level == TraceLevel::Summary && !is_summary_event(rec.ev)) return;
  rec.t = now_;
  trace_.push_back(std::move(rec));
}

void Simulation::run_until(double t_end) {
  if (!(t_end > 0.0)) throw std::invalid_argument("run_until: t_end must be positive");
  if (finished_) throw std::logic_error("run_until: simulation already finished");
  while (!queue_.empty() && queue_.top().t <= t_end) {
    const Event ev = queue_.top();
    queue_.pop();
    now_ = ev.t;
    ++processed_;
    dispatch(ev);
  }
  now_ = std::max(now_, t_end);
  for (auto& n : nodes_) {
    TraceRecord r;
    r.node = n->id;
    r.ev = TraceEvent::End;
    r.energy = current_energy(*n);
    emit(std::move(r));
  }
  finished_ = true;
}

void Simulation::dispatch(const Event& ev) {
  switch (ev.type) {
    case EventType::Timer: {
      auto it = timers_.find(ev.ref);
      if (it == timers_.end()) return;
      const auto [node, tag] = it->second;
      timers_.erase(it);
      if (!nodes_[node]->alive) return;
      TraceRecord r;
      r.node = node;
      r.ev = TraceEvent::Timer;
      r.reason = std::string(to_string(tag.kind));
      if (tag.kind != TimerKind::Hello && tag.kind != TimerKind::NeighborExpiry &&
          tag.kind != TimerKind::Holddown) {
        r.src = tag.key.source;
        r.bid = tag.key.broadcast_id;
      }
      emit(std::move(r));
      nodes_[node]->proto->on_timer(ev.ref, tag);
      return;
    }
    case EventType::MacAttempt:
      on_mac_attempt(ev.node);
      return;
    case EventType::TxEnd:
      on_tx_end(ev.node, ev.ref);
      return;
    case EventType::RxEnd:
      on_rx_end(ev.node, ev.ref);
      return;
    case EventType::Mobility:
      on_transition(ev.node, ev.ref);
      return;
    case EventType::Traffic:
      on_traffic(ev.node);
      return;
    case EventType::Death: {
      Node& n = *nodes_[ev.node];
      if (!n.alive || ev.ref != n.death_gen) return;
      settle_idle(n);
      if (!n.alive) return;
      if (n.energy.residual <= 1e-9) {
        n.energy.residual = 0.0;
        die(ev.node, "depleted");
      } else {
        reschedule_death(ev.node);
      }
      return;
    }
    case EventType::Kill:
      if (nodes_[ev.node]->alive) {
        settle_idle(*nodes_[ev.node]);
        nodes_[ev.node]->energy.residual = 0.0;
        die(ev.node, "killed");
      }
      return;
    case EventType::Inject:
      if (nodes_[ev.node]->alive) generate_data(ev.node);
      return;
    case EventType::Script: {
      const auto& [packet, to, immediate] = scripted_[ev.ref];
      FrameOptions opts;
      opts.immediate = immediate;
      if (to == kNoNode) {
        nodes_[ev.node]->services->broadcast(packet, opts);
      } else {
        nodes_[ev.node]->services->unicast(packet, to, opts);
      }
      return;
    }
  }
}

// ---------------------------------------------------------------- mobility

Position Simulation::position_of(NodeId id) const {
  const Node& n = *nodes_.at(id);
  Position p = position_after(n.mob, now_ - n.mob_time);
  p.x = std::clamp(p.x, 0.0, mobility_.area_width);
  p.y = std::clamp(p.y, 0.0, mobility_.area_height);
  return p;
}

void Simulation::schedule_transition(NodeId id) {
  Node& n = *nodes_[id];
  const double due = time_to_transition(n.mob);
  if (!std::isfinite(due)) return;
  ++n.mob_gen;
  schedule(now_ + due, EventType::Mobility, id, n.mob_gen);
}

void Simulation::on_transition(NodeId id, std::uint64_t generation) {
  Node& n = *nodes_[id];
  if (generation != n.mob_gen) return;
  // Dead nodes keep flying; only their radios stop.
  complete_transition(n.mob, mobility_, n.mob_rng);
  n.mob_time = now_;
  TraceRecord r;
  r.node = id;
  r.ev = TraceEvent::Mobility;
  r.value = n.mob.current_speed();
  r.detail = format_position(n.mob.position);
  emit(std::move(r));
  schedule_transition(id);
}

// ------------------------------------------------------------------ energy

double Simulation::current_energy(const Node& n) const {
  if (n.energy.unlimited || !n.alive) return n.energy.residual;
  const double dt = now_ - n.energy_time;
  return std::max(0.0, n.energy.residual - dt * n.energy.idle_drain);
}

double Simulation::energy_of(NodeId id) { return current_energy(*nodes_.at(id)); }

bool Simulation::alive(NodeId id) const { return nodes_.at(id)->alive; }

RoutingProtocol& Simulation::protocol(NodeId id) { return *nodes_.at(id)->proto; }

void Simulation::settle_idle(Node& n) {
  const double dt = now_ - n.energy_time;
  n.energy_time = now_;
  if (!n.alive || n.energy.idle_drain <= 0.0 || dt <= 0.0) return;
  const auto r = debit_energy(n.energy, EnergyUse::Idle, 0, dt);
  n.energy = r.budget;
  if (r.died) die(n.id, "depleted");
}

void Simulation::debit(NodeId id, EnergyUse use, std::uint64_t bits, double* drawn) {
  Node& n = *nodes_[id];
  settle_idle(n);
  if (!n.alive) {
    if (drawn) *drawn = 0.0;
    return;
  }
  const auto r = debit_energy(n.energy, use, bits, 0.0);
  n.energy = r.budget;
  if (drawn) *drawn = r.drawn;
  if (r.died) {
    die(id, "depleted");
  } else {
    reschedule_death(id);
  }
}

void Simulation::die(NodeId id, const char* reason) {
  Node& n = *nodes_[id];
  if (!n.alive) return;
  n.alive = false;
  n.energy.residual = 0.0;
  ++n.death_gen;
  n.mac_queue.clear();
  TraceRecord r;
  r.node = id;
  r.ev = TraceEvent::Death;
  r.energy = 0.0;
  r.reason = reason;
  emit(std::move(r));
}

void Simulation::reschedule_death(NodeId id) {
  Node& n = *nodes_[id];
  if (!n.alive || n.energy.unlimited || n.energy.idle_drain <= 0.0) return;
  ++n.death_gen;
  schedule(now_ + n.energy.residual / n.energy.idle_drain, EventType::Death, id, n.death_gen);
}

void Simulation::kill_node(NodeId id, double at) { schedule(at, EventType::Kill, id); }

void Simulation::inject_data(NodeId source, double at) { schedule(at, EventType::Inject, source); }

void Simulation::inject_frame(NodeId from, Packet packet, double at, NodeId to,
                              bool immediate) {
  scripted_.push_back({std::move(packet), to, immediate});
  schedule(at, EventType::Script, from, scripted_.size() - 1);
}

// ------------------------------------------------------------- MAC/channel

void Simulation::enqueue(NodeId id, std::shared_ptr<Frame> frame) {
  Node& n = *nodes_[id];
  if (!n.alive) return;
  if (n.mac_queue.size() >= kMacQueueLimit) {
    TraceRecord r;
    r.node = id;
    r.ev = TraceEvent::Drop;
    r.msg = kind_of(frame->packet);
    r.reason = "mac_queue_full";
    emit(std::move(r));
    if (frame->target != kNoNode) report_unicast(*frame, false);
    return;
  }
  n.mac_queue.push_back(std::move(frame));
  if (!n.mac_active) {
    n.mac_active = true;
    schedule_attempt(id, true);
  }
}

void Simulation::schedule_attempt(NodeId id, bool allow_immediate) {
  Node& n = *nodes_[id];
  const bool immediate =
      allow_immediate && !n.mac_queue.empty() && n.mac_queue.front()->opts.immediate;
  double backoff = 0.0;
  if (!immediate) {
    const std::uint32_t retries = n.mac_queue.empty() ? 0 : n.mac_queue.front()->retries;
    const std::uint64_t window = (std::uint64_t{cfg_.cw} + 1) << retries;
    backoff = static_cast<double>(n.mac_rng.below(window - 1)) * cfg_.slot_time;
  }
  schedule(now_ + backoff, EventType::MacAttempt, id);
}

bool Simulation::medium_busy(const Node& n) const {
  if (now_ < n.tx_until) return true;
  // A frame is sensed from its first arriving bit, so senders that start in
  // the same instant do not hear each other and collide.
  return std::any_of(n.rx.begin(), n.rx.end(),
                     [&](const Reception& r) { return r.start <= now_ && now_ < r.end; });
}

void Simulation::on_mac_attempt(NodeId id) {
  Node& n = *nodes_[id];
  if (!n.alive || n.mac_queue.empty()) {
    n.mac_active = false;
    return;
  }
  if (medium_busy(n)) {
    const double idle_at = std::max(n.busy_until, n.tx_until);
    const double backoff = static_cast<double>(n.mac_rng.below(cfg_.cw)) * cfg_.slot_time;
    schedule(idle_at + backoff, EventType::MacAttempt, id);
    return;
  }
  auto frame = std::move(n.mac_queue.front());
  n.mac_queue.pop_front();
  transmit(id, std::move(frame));
}

void Simulation::transmit(NodeId id, std::shared_ptr<Frame> frame) {
  Node& n = *nodes_[id];
  const auto kind = kind_of(frame->packet);
  const auto tag = discovery_tag(frame->packet);

  if (!n.proto->may_transmit()) {
    TraceRecord r;
    r.node = id;
    r.ev = TraceEvent::Drop;
    r.msg = kind;
    r.peer = frame->target;
    r.energy = current_energy(n);
    r.reason = "energy_gate";
    emit(std::move(r));
    if (frame->target != kNoNode) report_unicast(*frame, false);
    if (n.alive && !n.mac_queue.empty()) {
      schedule_attempt(id, true);
    } else {
      n.mac_active = false;
    }
    return;
  }

  const std::uint64_t bits = (frame->net_bytes + cfg_.mac_overhead_bytes) * 8;
  const double before = current_energy(n);
  double drawn = 0.0;
  {
    // Record the send before the debit so a fatal debit still shows the frame.
    TraceRecord r;
    r.node = id;
    r.ev = TraceEvent::Tx;
    r.msg = kind;
    r.bytes = static_cast<std::uint32_t>(frame->net_bytes);
    r.peer = frame->target;
    if (tag) {
      r.src = tag->source;
      r.bid = tag->broadcast_id;
    }
    r.energy = before;
    const auto cost = energy_cost(n.energy, EnergyUse::Tx, bits, 0.0);
    r.cost = n.energy.unlimited ? 0.0 : std::min(cost, before);
    emit(std::move(r));
  }
  debit(id, EnergyUse::Tx, bits, &drawn);

  const double airtime = frame_airtime(cfg_, frame->net_bytes);
  n.tx_until = now_ + airtime;
  for (auto& rx : n.rx) {
    if (rx.end > now_) rx.collided = true;  // half duplex
  }

  const Position here = position_of(id);
  for (auto& other : nodes_) {
    if (other->id == id || !other->alive) continue;
    const double d = distance(here, position_of(other->id));
    if (!radio_.receivable(d)) continue;
    Reception rec;
    rec.frame = frame;
    rec.start = now_ + d / kSpeedOfLight;
    rec.end = rec.start + airtime;
    rec.rssi = radio_.rssi(std::max(d, kMinDistance));
    rec.id = next_reception_++;
    rec.collided = other->tx_until > rec.start;
    for (auto& prior : other->rx) {
      if (prior.start < rec.end && rec.start < prior.end) {
        prior.collided = true;
        rec.collided = true;
      }
    }
    other->busy_until = std::max(other->busy_until, rec.end);
    if (other->id == frame->target) frame->reached_target = true;
    schedule(rec.end, EventType::RxEnd, other->id, rec.id);
    other->rx.push_back(std::move(rec));
  }
  in_flight_[frame->id] = frame;
  schedule(now_ + airtime, EventType::TxEnd, id, frame->id);
}

void Simulation::on_tx_end(NodeId id, std::uint64_t frame_id) {
  auto it = in_flight_.find(frame_id);
  if (it != in_flight_.end()) {
    const auto frame = it->second;
    in_flight_.erase(it);
    if (frame->target != kNoNode && !frame->reached_target) ack_missing(*frame);
  }
  Node& n = *nodes_[id];
  if (n.alive && !n.mac_queue.empty()) {
    n.mac_active = true;
    schedule_attempt(id, true);
  } else {
    n.mac_active = false;
  }
}

void Simulation::on_rx_end(NodeId id, std::uint64_t reception_id) {
  Node& n = *nodes_[id];
  auto it = std::find_if(n.rx.begin(), n.rx.end(),
                         [&](const Reception& r) { return r.id == reception_id; });
  if (it == n.rx.end()) return;
  const Reception rec = std::move(*it);
  n.rx.erase(it);
  const Frame& f = *rec.frame;
  const bool targeted = f.target == id;
  const bool addressed = f.target == kNoNode || targeted;

  if (!n.alive) {
    if (targeted) ack_missing(f);
    return;
  }
  if (!addressed) return;

  const std::uint64_t bits = (f.net_bytes + cfg_.mac_overhead_bytes) * 8;
  double drawn = 0.0;
  debit(id, EnergyUse::Rx, bits, &drawn);

  auto drop = [&](const char* reason) {
    TraceRecord r;
    r.node = id;
    r.ev = TraceEvent::Drop;
    r.msg = kind_of(f.packet);
    r.bytes = static_cast<std::uint32_t>(f.net_bytes);
    r.peer = f.sender;
    r.cost = drawn;
    r.reason = reason;
    emit(std::move(r));
    if (targeted) ack_missing(f);
  };

  if (rec.collided) return drop("collision");
  if (!n.alive) return drop("depleted");
  if (rec.rssi < radio_.rssi_threshold_dbm) return drop("weak_signal");
  if (targeted && !n.proto->may_transmit()) return drop("cannot_ack");

  {
    TraceRecord r;
    r.node = id;
    r.ev = TraceEvent::Rx;
    r.msg = kind_of(f.packet);
    r.bytes = static_cast<std::uint32_t>(f.net_bytes);
    r.peer = f.sender;
    const auto tag = discovery_tag(f.packet);
    if (tag) {
      r.src = tag->source;
      r.bid = tag->broadcast_id;
    }
    r.cost = drawn;
    r.value = rec.rssi;
    emit(std::move(r));
  }
  if (targeted) report_unicast(f, true);
  n.proto->on_receive(f.packet, f.sender, rec.rssi);
}

bool Simulation::cancel_queued(NodeId id, const DiscoveryKey& key) {
  Node& n = *nodes_[id];
  const auto before = n.mac_queue.size();
  std::erase_if(n.mac_queue, [&](const std::shared_ptr<Frame>& f) {
    return f->opts.suppress_key && *f->opts.suppress_key == key;
  });
  return n.mac_queue.size() != before;
}

void Simulation::ack_missing(const Frame& f) {
  Node& s = *nodes_[f.sender];
  if (!s.alive) return;
  if (f.retries >= cfg_.mac_retry_limit) return report_unicast(f, false);
  auto copy = std::make_shared<Frame>(f);
  copy->id = next_frame_++;
  copy->reached_target = false;
  ++copy->retries;
  s.mac_queue.push_front(std::move(copy));
  if (!s.mac_active) {
    s.mac_active = true;
    schedule_attempt(f.sender, false);
  }
}

void Simulation::report_unicast(const Frame& f, bool delivered) {
  Node& s = *nodes_[f.sender];
  if (!s.alive) return;
  s.proto->on_unicast_result(f.packet, f.target, delivered);
}

// ----------------------------------------------------------------- traffic

void Simulation::on_traffic(NodeId id) {
  Node& n = *nodes_[id];
  if (!n.alive) return;
  generate_data(id);
  if (cfg_.cbr_count == 0 || n.data_seq < cfg_.cbr_count) {
    schedule(now_ + cfg_.cbr_interval, EventType::Traffic, id);
  }
}

void Simulation::generate_data(NodeId id) {
  Node& n = *nodes_[id];
  DataPacket pkt;
  pkt.source_id = id;
  pkt.dest_id = cfg_.destination;
  pkt.seq = n.data_seq++;
  pkt.created = now_;
  pkt.payload_bytes = static_cast<std::uint16_t>(cfg_.packet_size);
  TraceRecord r;
  r.node = id;
  r.ev = TraceEvent::Generate;
  r.msg = MsgKind::Data;
  r.value = pkt.seq;
  emit(std::move(r));
  n.proto->on_data_generated(pkt);
}

}  // namespace rlpr
