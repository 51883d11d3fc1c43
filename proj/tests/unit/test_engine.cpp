#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "rlpr/engine.hpp"
#include "rlpr/metrics.hpp"

using namespace rlpr;

namespace {

ScenarioConfig static_layout(std::vector<Position> positions) {
  ScenarioConfig cfg;
  cfg.node_count = static_cast<std::uint32_t>(positions.size());
  cfg.positions = std::move(positions);
  cfg.static_nodes = true;
  cfg.trace_level = TraceLevel::Full;
  cfg.traffic_start = 1000.0;  // no CBR unless a test asks for it
  cfg.sim_duration = 2000.0;
  return cfg;
}

// RERR frames never occur on their own in these layouts, so they are easy to
// pick out of the trace.
const Packet kProbe = RerrMessage{0, 1, 2};

std::vector<TraceRecord> probe_records(const std::vector<TraceRecord>& trace, NodeId node,
                                       TraceEvent ev) {
  std::vector<TraceRecord> out;
  for (const auto& r : trace) {
    if (r.node == node && r.ev == ev && r.msg == MsgKind::Rerr) out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("hidden senders collide at the shared receiver") {
  Simulation sim(static_layout({{900, 900}, {100, 500}, {300, 500}, {500, 500}}), 1);
  sim.inject_frame(1, kProbe, 0.5);
  sim.inject_frame(3, kProbe, 0.5);
  sim.run_until(1.0);
  const auto drops = probe_records(sim.trace(), 2, TraceEvent::Drop);
  CHECK(drops.size() == 2);
  for (const auto& d : drops) CHECK(d.reason == "collision");
  CHECK(probe_records(sim.trace(), 2, TraceEvent::Rx).empty());
  CHECK(probe_records(sim.trace(), 1, TraceEvent::Tx).size() == 1);
  CHECK(probe_records(sim.trace(), 3, TraceEvent::Tx).size() == 1);
}

TEST_CASE("delivery follows the range") {
  Simulation sim(static_layout({{900, 900}, {100, 500}, {400, 500}, {100, 700}}), 1);
  sim.inject_frame(1, kProbe, 0.5);
  sim.run_until(1.0);
  const auto rx = probe_records(sim.trace(), 3, TraceEvent::Rx);
  REQUIRE(rx.size() == 1);
  CHECK(rx[0].value == doctest::Approx(sim.config().radio().rssi(200.0)));
  // Causality: reception ends one airtime plus the flight time after the start.
  const auto tx = probe_records(sim.trace(), 1, TraceEvent::Tx);
  REQUIRE(tx.size() == 1);
  CHECK(rx[0].t == doctest::Approx(tx[0].t + frame_airtime(sim.config(), tx[0].bytes) +
                                   200.0 / kSpeedOfLight));
  CHECK(probe_records(sim.trace(), 2, TraceEvent::Rx).empty());
  CHECK(probe_records(sim.trace(), 2, TraceEvent::Drop).empty());
}

TEST_CASE("dead receivers hear nothing and pay nothing") {
  Simulation sim(static_layout({{900, 900}, {100, 500}, {100, 700}}), 1);
  sim.kill_node(2, 0.2);
  sim.inject_frame(1, kProbe, 0.5);
  sim.run_until(1.0);
  CHECK_FALSE(sim.alive(2));
  CHECK(sim.energy_of(2) == 0.0);
  for (const auto& r : sim.trace()) {
    if (r.node != 2 || r.t <= 0.2) continue;
    CHECK((r.ev == TraceEvent::Death || r.ev == TraceEvent::End));
  }
}

TEST_CASE("scheduling in the past is a bug trap") {
  Simulation sim(static_layout({{900, 900}, {100, 500}}), 1);
  sim.run_until(1.0);
  CHECK_THROWS_AS(sim.inject_data(1, 0.5), std::logic_error);
  CHECK_THROWS_AS(sim.run_until(2.0), std::logic_error);
}

TEST_CASE("runs are reproducible") {
  ScenarioConfig cfg;
  cfg.node_count = 20;
  cfg.source_count = 2;
  cfg.sim_duration = 60.0;
  cfg.trace_level = TraceLevel::Full;
  auto lines = [&](std::uint64_t seed) {
    Simulation sim(cfg, seed);
    sim.run();
    std::vector<std::string> out;
    for (const auto& r : sim.trace()) out.push_back(to_ndjson_line(r));
    return out;
  };
  const auto a = lines(5);
  CHECK(a == lines(5));
  CHECK(a != lines(6));
}

TEST_CASE("a killed relay forces zoom-out and rediscovery") {
  auto cfg = static_layout({{500, 500}, {100, 500}, {300, 500}});
  cfg.traffic_start = 5.0;
  Simulation sim(cfg, 1);
  sim.kill_node(2, 20.0);
  sim.run_until(40.0);
  const auto& tr = sim.trace();
  auto any = [&](auto pred) { return std::any_of(tr.begin(), tr.end(), pred); };
  CHECK(any([](const TraceRecord& r) {
    return r.node == 0 && r.ev == TraceEvent::Deliver && r.t < 20.0;
  }));
  CHECK(any([](const TraceRecord& r) {
    return r.node == 1 && r.ev == TraceEvent::Tx && r.msg == MsgKind::ZoomOut && r.t > 20.0;
  }));
  CHECK(any([](const TraceRecord& r) {
    return r.node == 1 && r.ev == TraceEvent::DiscStart && r.t > 20.0;
  }));
  CHECK_FALSE(any([](const TraceRecord& r) {
    return r.node == 2 && r.ev == TraceEvent::Tx && r.t >= 20.0;
  }));
  CHECK_FALSE(any([](const TraceRecord& r) {
    return r.node == 0 && r.ev == TraceEvent::Deliver && r.t > 21.0;
  }));
}

TEST_CASE("initial backoff stays inside the contention window") {
  auto cfg = static_layout({{900, 900}, {100, 100}});
  cfg.energies = {100, 100};
  cfg.hello_interval = 1000.0;
  Simulation sim(cfg, 3);
  std::vector<double> starts;
  for (int i = 0; i < 400; ++i) {
    starts.push_back(1.0 + 0.01 * i);
    sim.inject_frame(1, kProbe, starts.back(), kNoNode, false);
  }
  sim.run_until(10.0);
  const auto tx = probe_records(sim.trace(), 1, TraceEvent::Tx);
  REQUIRE(tx.size() == starts.size());
  std::map<long, int> slots;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    const double delay = tx[i].t - starts[i];
    REQUIRE(delay >= 0.0);
    REQUIRE(delay < 300e-6);
    ++slots[std::lround(delay / cfg.slot_time)];
  }
  CHECK(slots.size() >= 10);
}

TEST_CASE("simultaneous senders mostly pick different slots") {
  auto cfg = static_layout({{900, 900}, {100, 100}, {150, 100}});
  cfg.energies = {100, 100, 100};
  cfg.hello_interval = 1000.0;
  Simulation sim(cfg, 4);
  const int trials = 2000;
  for (int i = 0; i < trials; ++i) {
    sim.inject_frame(1, kProbe, 1.0 + 0.005 * i, kNoNode, false);
    sim.inject_frame(2, kProbe, 1.0 + 0.005 * i, kNoNode, false);
  }
  sim.run_until(20.0);
  const auto a = probe_records(sim.trace(), 1, TraceEvent::Tx);
  const auto b = probe_records(sim.trace(), 2, TraceEvent::Tx);
  REQUIRE(a.size() == trials);
  REQUIRE(b.size() == trials);
  int same = 0;
  for (int i = 0; i < trials; ++i) same += a[i].t == b[i].t;
  // Two draws from 15 slots coincide with probability 1/15.
  CHECK(same > 0);
  CHECK(same < trials / 8);
}

TEST_CASE("trace replay reproduces every final energy") {
  for (auto p : {ProtocolKind::Rlpr, ProtocolKind::Aodv}) {
    CAPTURE(to_string(p));
    ScenarioConfig cfg;
    cfg.protocol = p;
    cfg.node_count = 20;
    cfg.source_count = 3;
    cfg.sim_duration = 120.0;
    cfg.trace_level = TraceLevel::Full;
    cfg.tx_cost_per_bit = 1e-3;  // heavy enough to exhaust batteries within the run
    Simulation sim(cfg, 7);
    sim.run();
    // RLPR stops transmitting at the threshold; AODV only at zero.
    const double gate = p == ProtocolKind::Rlpr ? cfg.energy_threshold : 0.0;
    std::map<NodeId, double> energy, final_energy;
    std::map<NodeId, bool> unlimited;
    int deaths = 0, gated = 0;
    for (const auto& r : sim.trace()) {
      switch (r.ev) {
        case TraceEvent::Init:
          energy[r.node] = r.energy;
          unlimited[r.node] = r.value == 1.0;
          break;
        case TraceEvent::Tx:
          CHECK(r.energy >= gate);
          CHECK(r.energy > 0.0);
          [[fallthrough]];
        case TraceEvent::Rx:
        case TraceEvent::Drop:
          if (r.ev == TraceEvent::Drop && r.reason == "energy_gate") ++gated;
          if (!std::isnan(r.cost) && !unlimited[r.node]) energy[r.node] -= r.cost;
          break;
        case TraceEvent::Death:
          ++deaths;
          break;
        case TraceEvent::End:
          final_energy[r.node] = r.energy;
          break;
        default:
          break;
      }
    }
    CHECK(deaths + gated > 0);
    REQUIRE(final_energy.size() == cfg.node_count);
    for (const auto& [id, e] : final_energy) {
      CAPTURE(id);
      CHECK(std::max(0.0, energy[id]) == doctest::Approx(e).epsilon(1e-9));
    }
  }
}

TEST_CASE("idle drain kills on schedule") {
  auto cfg = static_layout({{900, 900}, {100, 100}});
  cfg.energies = {100.0, 41.27};
  cfg.idle_drain = 0.1;
  cfg.tx_cost_per_bit = 0.0;
  cfg.rx_cost_per_bit = 0.0;
  cfg.energy_threshold = 0.0;
  cfg.sim_duration = 600.0;
  Simulation sim(cfg, 1);
  sim.run();
  const auto death = std::find_if(sim.trace().begin(), sim.trace().end(),
                                  [](const auto& r) { return r.ev == TraceEvent::Death; });
  REQUIRE(death != sim.trace().end());
  CHECK(death->node == 1);
  CHECK(death->t == doctest::Approx(412.7).epsilon(1e-9));
  CHECK(network_lifetime(sim.trace()) == doctest::Approx(412.7).epsilon(1e-9));
}

}  // TEST_SUITE
