#pragma once

// Minimal collision-free network for driving protocol objects directly:
// frames reach every node in range after a fixed airtime, timers fire in
// order, positions never change. Velocities are reported but not applied.

#include <functional>
#include <memory>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "rlpr/config.hpp"
#include "rlpr/protocol.hpp"
#include "rlpr/radio.hpp"

namespace rlpr::testing {

struct SentFrame {
  double t = 0.0;
  NodeId from = kNoNode;
  NodeId to = kNoNode;  // kNoNode: broadcast
  Packet packet;
};

class FakeNet {
 public:
  struct NodeSetup {
    Position position;
    Velocity velocity;
    double energy = 50.0;
  };

  FakeNet(ScenarioConfig cfg, std::vector<NodeSetup> setup, double airtime = 5e-4)
      : cfg_(std::move(cfg)),
        radio_(cfg_.radio()),
        airtime_(airtime),
        rng_(7) {
    for (NodeId i = 0; i < setup.size(); ++i) {
      nodes_.push_back(std::make_unique<Node>(*this, i, setup[i]));
    }
    for (auto& n : nodes_) n->proto = make_protocol(cfg_.protocol, cfg_, *n);
  }

  void start_all() {
    for (auto& n : nodes_) n->proto->start();
  }

  void run_until(double t_end) {
    while (!queue_.empty() && queue_.top().t <= t_end) {
      Event ev = queue_.top();
      queue_.pop();
      now_ = ev.t;
      ev.fn();
    }
    now_ = t_end;
  }

  void generate(NodeId src, std::uint32_t seq = 0) {
    DataPacket d;
    d.source_id = src;
    d.dest_id = cfg_.destination;
    d.seq = seq;
    d.created = now_;
    nodes_[src]->proto->on_data_generated(d);
  }

  void set_energy(NodeId id, double e) { nodes_[id]->setup.energy = e; }
  RoutingProtocol& protocol(NodeId id) { return *nodes_[id]->proto; }
  const std::vector<SentFrame>& sent() const { return sent_; }
  const std::vector<std::pair<NodeId, ProtocolNote>>& notes() const { return notes_; }
  double now() const { return now_; }

 private:
  struct Event {
    double t;
    std::uint64_t seq;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.t != b.t ? a.t > b.t : a.seq > b.seq;
    }
  };

  struct Node : NodeServices {
    Node(FakeNet& net_, NodeId id_, NodeSetup s) : net(net_), id(id_), setup(s) {}

    NodeId self() const override { return id; }
    double now() const override { return net.now_; }
    Position position() const override { return setup.position; }
    Velocity velocity() const override { return setup.velocity; }
    double residual_energy() const override { return setup.energy; }

    void broadcast(Packet packet, FrameOptions) override { net.send(id, kNoNode, packet); }
    void unicast(Packet packet, NodeId to, FrameOptions) override { net.send(id, to, packet); }
    bool cancel_queued(const DiscoveryKey&) override { return false; }

    TimerId start_timer(double delay, TimerTag tag) override {
      const TimerId t = net.next_timer_++;
      net.live_timers_.insert(t);
      net.at(net.now_ + delay, [this, t, tag] {
        auto it = net.live_timers_.find(t);
        if (it == net.live_timers_.end()) return;
        net.live_timers_.erase(it);
        proto->on_timer(t, tag);
      });
      return t;
    }
    void cancel_timer(TimerId t) override { net.live_timers_.erase(t); }
    double uniform(double lo, double hi) override {
      return std::uniform_real_distribution<double>(lo, hi)(net.rng_);
    }
    void record(const ProtocolNote& note) override { net.notes_.emplace_back(id, note); }

    FakeNet& net;
    NodeId id;
    NodeSetup setup;
    std::unique_ptr<RoutingProtocol> proto;
  };

  void at(double t, std::function<void()> fn) { queue_.push({t, seq_++, std::move(fn)}); }

  void send(NodeId from, NodeId to, const Packet& packet) {
    if (!nodes_[from]->proto->may_transmit()) return;
    sent_.push_back({now_, from, to, packet});
    const Position p = nodes_[from]->setup.position;
    bool reached = false;
    for (auto& n : nodes_) {
      if (n->id == from) continue;
      const double d = distance(p, n->setup.position);
      if (!radio_.receivable(d)) continue;
      if (to != kNoNode && n->id != to) continue;
      reached = true;
      const double rssi = radio_.rssi(std::max(d, 1e-3));
      Node* rx = n.get();
      at(now_ + airtime_, [rx, packet, from, rssi] { rx->proto->on_receive(packet, from, rssi); });
    }
    if (to != kNoNode) {
      at(now_ + airtime_, [this, from, to, packet, reached] {
        nodes_[from]->proto->on_unicast_result(packet, to, reached);
      });
    }
  }

  ScenarioConfig cfg_;
  RadioModel radio_;
  double airtime_;
  std::mt19937_64 rng_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  TimerId next_timer_ = 1;
  std::set<TimerId> live_timers_;
  double now_ = 0.0;
  std::vector<SentFrame> sent_;
  std::vector<std::pair<NodeId, ProtocolNote>> notes_;
};

}  // namespace rlpr::testing
