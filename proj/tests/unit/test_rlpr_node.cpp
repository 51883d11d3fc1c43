#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fake_net.hpp"
#include "rlpr/rlpr_node.hpp"

using namespace rlpr;
using rlpr::testing::FakeNet;

namespace {

using Setup = std::vector<FakeNet::NodeSetup>;

ScenarioConfig config_for(const Setup& s, ProtocolKind p = ProtocolKind::Rlpr) {
  ScenarioConfig cfg;
  cfg.protocol = p;
  cfg.node_count = static_cast<std::uint32_t>(s.size());
  for (const auto& n : s) cfg.positions.push_back(n.position);
  return cfg;
}

RlprNode& rlpr_at(FakeNet& net, NodeId id) { return dynamic_cast<RlprNode&>(net.protocol(id)); }

template <class T>
std::size_t count_sent(const FakeNet& net, NodeId from, double after = -1.0) {
  return static_cast<std::size_t>(std::count_if(
      net.sent().begin(), net.sent().end(), [&](const testing::SentFrame& f) {
        return f.from == from && f.t > after && std::holds_alternative<T>(f.packet);
      }));
}

std::size_t count_notes(const FakeNet& net, NodeId node, TraceEvent ev, const std::string& reason) {
  return static_cast<std::size_t>(
      std::count_if(net.notes().begin(), net.notes().end(), [&](const auto& n) {
        return n.first == node && n.second.ev == ev && n.second.reason == reason;
      }));
}

HelloMessage hello_from(NodeId id, Position p, double energy) {
  HelloMessage h;
  h.sender_id = id;
  h.position = p;
  h.residual_energy = energy;
  return h;
}

RlrqMessage rlrq_from(NodeId prev, Position p, std::vector<NodeId> front) {
  RlrqMessage m;
  m.source_id = prev;
  m.dest_id = 0;
  m.broadcast_id = 1;
  m.prev_hop_id = prev;
  m.prev_hop_position = p;
  m.front_relatives = std::move(front);
  return m;
}

}  // namespace

TEST_SUITE("rlpr_node") {

TEST_CASE("hello beacons respect the energy gate") {
  for (auto [energy, expect] : {std::pair{50.0, 5u}, {9.0, 0u}, {10.0, 5u}}) {
    Setup s{{{900, 500}}, {{700, 500}, {}, energy}};
    FakeNet net(config_for(s), s);
    net.start_all();
    net.run_until(4.999);
    CAPTURE(energy);
    CHECK(count_sent<HelloMessage>(net, 1) == expect);
    CHECK(net.protocol(1).may_transmit() == (energy >= 10.0));
  }
}

TEST_CASE("hello receive maintains the front-relative table") {
  Setup s{{{900, 500}}, {{500, 500}}, {{400, 500}}, {{600, 500}}, {{600, 520}}};
  FakeNet net(config_for(s), s);
  auto& node = rlpr_at(net, 1);
  const double rad = 150.0 * M_PI / 180.0;
  const Position rear{500 + 100 * std::cos(rad), 500 + 100 * std::sin(rad)};

  node.on_receive(hello_from(2, rear, 50), 2, -60);
  node.on_receive(hello_from(3, {600, 500}, 50), 3, -60);
  node.on_receive(hello_from(4, {600, 520}, 9.5), 4, -60);
  node.on_receive(hello_from(3, {601, 500}, 49), 3, -60);

  CHECK(node.neighbors().size() == 3);
  CHECK(node.neighbors().find(3)->position.x == 601.0);
  CHECK(node.front_relatives().members() == std::vector<NodeId>{3});

  // A member that later advertises too little energy leaves the table.
  node.on_receive(hello_from(3, {601, 500}, 9.0), 3, -60);
  CHECK(node.front_relatives().members().empty());
  CHECK(node.neighbors().contains(3));
}

TEST_CASE("rlrq gates") {
  Setup s{{{900, 500}}, {{400, 500}}, {{600, 500}}, {{300, 500}}};
  FakeNet net(config_for(s), s);
  auto& node = rlpr_at(net, 2);

  SUBCASE("not a front relative") {
    node.on_receive(rlrq_from(1, {400, 500}, {3}), 1, -60);
    net.run_until(1.0);
    CHECK(node.pending_contentions() == 0);
    CHECK(count_sent<RlrqMessage>(net, 2) == 0);
    CHECK(count_notes(net, 2, TraceEvent::Drop, "not_front_relative") == 1);
  }
  SUBCASE("weak signal") {
    node.on_receive(rlrq_from(1, {400, 500}, {2}), 1, -70);
    net.run_until(1.0);
    CHECK(count_sent<RlrqMessage>(net, 2) == 0);
    CHECK(count_notes(net, 2, TraceEvent::Drop, "weak_signal") == 1);
  }
  SUBCASE("below the energy threshold") {
    net.set_energy(2, 9.99);
    node.on_receive(rlrq_from(1, {400, 500}, {2}), 1, -60);
    net.run_until(1.0);
    CHECK(count_sent<RlrqMessage>(net, 2) == 0);
    CHECK(count_notes(net, 2, TraceEvent::Drop, "energy_gate") == 1);
  }
  SUBCASE("a second copy of the request suppresses the timer") {
    node.on_receive(rlrq_from(1, {400, 500}, {2}), 1, -60);
    CHECK(node.pending_contentions() == 1);
    node.on_receive(rlrq_from(1, {400, 500}, {2}), 1, -60);  // same key again
    CHECK(node.pending_contentions() == 0);
    net.run_until(1.0);
    CHECK(count_sent<RlrqMessage>(net, 2) == 0);
  }
  SUBCASE("timer fires") {
    node.on_receive(rlrq_from(1, {400, 500}, {2}), 1, -60);
    net.run_until(1.0);
    REQUIRE(count_sent<RlrqMessage>(net, 2) == 1);
    const auto& m = std::get<RlrqMessage>(net.sent().back().packet);
    CHECK(m.source_id == 1);
    CHECK(m.broadcast_id == 1);
    CHECK(m.prev_hop_id == 2);
    CHECK(m.hop_count == 1);
    // GD = |1 - 200/250| = 0.2 at zero speed; delay = 10 ms * 0.1 + 3 jitter units.
    CHECK(net.sent().back().t == doctest::Approx(0.010 * 0.1 + 3 * 5e-6));
  }
}

TEST_CASE("overheard rebroadcast cancels a pending timer") {
  Setup s{{{900, 500}}, {{400, 500}}, {{600, 500}}, {{610, 500}}};
  FakeNet net(config_for(s), s);
  auto& node = rlpr_at(net, 2);
  node.on_receive(rlrq_from(1, {400, 500}, {2, 3}), 1, -60);
  RlrqMessage heard = rlrq_from(1, {400, 500}, {});
  heard.prev_hop_id = 3;
  node.on_receive(heard, 3, -50);
  net.run_until(1.0);
  CHECK(count_sent<RlrqMessage>(net, 2) == 0);
  CHECK(std::any_of(net.notes().begin(), net.notes().end(),
                    [](const auto& n) { return n.second.ev == TraceEvent::ContCancel; }));
}

TEST_CASE("equal metrics break ties by node id") {
  // Nodes 3 and 9 mirror each other about the source-destination axis.
  Setup s(10);
  for (NodeId i = 0; i < 10; ++i) s[i].position = {20.0, 20.0 + 100.0 * i};
  s[0].position = {900, 500};
  s[1].position = {500, 500};
  s[3].position = {600, 550};
  s[9].position = {600, 450};
  FakeNet net(config_for(s), s, 1e-6);
  net.start_all();
  net.run_until(3.0);
  net.generate(1);
  net.run_until(3.5);
  CHECK(count_sent<RlrqMessage>(net, 3) == 1);
  CHECK(count_sent<RlrqMessage>(net, 9) == 0);
}

TEST_CASE("destination answers and the reply walks the reverse path") {
  Setup s{{{500, 500}}, {{100, 500}}, {{300, 500}}};
  FakeNet net(config_for(s), s);
  net.start_all();
  net.run_until(3.0);
  net.generate(1, 0);
  net.run_until(4.0);

  CHECK(count_sent<RlrqMessage>(net, 1) == 1);
  CHECK(count_sent<RlrqMessage>(net, 2) == 1);
  CHECK(count_sent<RlrqMessage>(net, 0) == 0);
  CHECK(count_sent<RlrpMessage>(net, 0) == 1);
  CHECK(count_sent<RlrpMessage>(net, 2) == 1);

  const auto* hop = rlpr_at(net, 2).routes().forward(0, net.now());
  REQUIRE(hop != nullptr);
  CHECK(hop->next_hop == 0);
  REQUIRE(rlpr_at(net, 1).routes().forward(0, net.now()) != nullptr);
  CHECK(rlpr_at(net, 1).routes().forward(0, net.now())->next_hop == 2);

  CHECK(count_sent<DataPacket>(net, 1) == 1);
  CHECK(count_sent<DataPacket>(net, 2) == 1);
  CHECK(count_notes(net, 0, TraceEvent::Deliver, "") == 1);

  // With a route in place the next packet goes straight out.
  net.generate(1, 1);
  net.run_until(5.0);
  CHECK(count_sent<RlrqMessage>(net, 1) == 1);
  CHECK(count_sent<DataPacket>(net, 1) == 2);
}

TEST_CASE("reply for an unknown discovery is an anomaly") {
  Setup s{{{900, 500}}, {{400, 500}}, {{600, 500}}};
  FakeNet net(config_for(s), s);
  net.protocol(2).on_receive(RlrpMessage{5, 0, 3, 2}, 0, -60);
  net.run_until(1.0);
  CHECK(count_notes(net, 2, TraceEvent::Anomaly, "orphan_reply") == 1);
  CHECK(net.sent().empty());
}

TEST_CASE("discovery retries use fresh broadcast ids") {
  Setup s{{{900, 500}}, {{100, 100}}};
  FakeNet net(config_for(s), s);
  net.start_all();
  net.generate(1);
  net.run_until(8.0);
  std::vector<BroadcastId> bids;
  for (const auto& f : net.sent()) {
    if (const auto* m = std::get_if<RlrqMessage>(&f.packet)) bids.push_back(m->broadcast_id);
  }
  CHECK(bids.size() == 3);  // first attempt plus two retries
  CHECK(std::adjacent_find(bids.begin(), bids.end(), std::greater_equal<>()) == bids.end());
  CHECK(count_notes(net, 1, TraceEvent::DiscEnd, "timeout") == 3);
  CHECK(count_notes(net, 1, TraceEvent::Drop, "no_route") == 1);
}

TEST_CASE("source buffer is drop-tail at the queue length") {
  Setup s{{{900, 500}}, {{100, 100}}};
  FakeNet net(config_for(s), s);
  for (std::uint32_t i = 0; i < 11; ++i) net.generate(1, i);
  CHECK(count_notes(net, 1, TraceEvent::Drop, "queue_full") == 1);
  CHECK(rlpr_at(net, 1).buffered() == 10);
}

TEST_CASE("silent neighbor triggers a zoom-out") {
  Setup s{{{900, 500}}, {{700, 500}}, {{750, 500}}};
  FakeNet net(config_for(s), s);
  net.start_all();
  net.run_until(5.0);
  auto zoom_outs = [&](NodeId id) {
    return std::count_if(net.sent().begin(), net.sent().end(), [&](const auto& f) {
      const auto* h = std::get_if<HelloMessage>(&f.packet);
      return f.from == id && h && h->zoom_out;
    });
  };
  CHECK(zoom_outs(1) == 0);
  net.set_energy(2, 9.0);  // node 2 stops beaconing
  net.run_until(10.0);
  CHECK(zoom_outs(1) == 1);
  CHECK_FALSE(rlpr_at(net, 1).neighbors().contains(2));
  CHECK(rlpr_at(net, 1).front_relatives().members() == std::vector<NodeId>{0});
}

}  // TEST_SUITE
