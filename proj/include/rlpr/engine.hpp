#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <queue>
#include <unordered_map>
#include <vector>

#include "rlpr/config.hpp"
#include "rlpr/energy.hpp"
#include "rlpr/mobility.hpp"
#include "rlpr/protocol.hpp"
#include "rlpr/radio.hpp"
#include "rlpr/rng.hpp"
#include "rlpr/trace.hpp"

namespace rlpr {

/// On-air duration of a frame of `net_bytes` network-layer bytes.
double frame_airtime(const ScenarioConfig& cfg, std::size_t net_bytes);

/// One simulated scenario for one seed. Single-threaded; an instance may be
/// moved to another thread before run() is called.
class Simulation {
 public:
  Simulation(ScenarioConfig cfg, std::uint64_t seed);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Processes every event with time <= t_end, then writes end-of-run records.
  /// May be called once.
  void run_until(double t_end);
  void run() { run_until(cfg_.sim_duration); }

  const std::vector<TraceRecord>& trace() const { return trace_; }
  std::vector<TraceRecord> take_trace() { return std::move(trace_); }

  // Inspection and scripting hooks for tests.
  double now() const { return now_; }
  std::size_t node_count() const { return nodes_.size(); }
  Position position_of(NodeId id) const;
  double energy_of(NodeId id);
  bool alive(NodeId id) const;
  RoutingProtocol& protocol(NodeId id);
  /// Drains the node's battery to zero at time `at`.
  void kill_node(NodeId id, double at);
  /// Schedules one extra data packet at `source` at time `at`.
  void inject_data(NodeId source, double at);
  /// Puts `packet` in the sender's MAC queue at time `at`. `to` = kNoNode
  /// broadcasts; `immediate` skips the initial backoff on an idle medium.
  void inject_frame(NodeId from, Packet packet, double at, NodeId to = kNoNode,
                    bool immediate = true);
  const ScenarioConfig& config() const { return cfg_; }
  std::uint64_t events_processed() const { return processed_; }

 private:
  enum class EventType : std::uint8_t {
    Timer,
    MacAttempt,
    TxEnd,
    RxEnd,
    Mobility,
    Traffic,
    Death,
    Kill,
    Inject,
    Script,
  };

  struct Event {
    double t = 0.0;
    std::uint64_t seq = 0;
    EventType type = EventType::Timer;
    NodeId node = kNoNode;
    std::uint64_t ref = 0;
  };

  struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
      return a.t != b.t ? a.t > b.t : a.seq > b.seq;
    }
  };

  struct Frame {
    std::uint64_t id = 0;
    NodeId sender = kNoNode;
    NodeId target = kNoNode;  // kNoNode for broadcast
    Packet packet;
    std::size_t net_bytes = 0;
    FrameOptions opts;
    bool reached_target = false;
    std::uint32_t retries = 0;
  };

  struct Reception {
    std::shared_ptr<const Frame> frame;
    double start = 0.0;
    double end = 0.0;
    double rssi = 0.0;
    bool collided = false;
    std::uint64_t id = 0;
  };

  struct Node;
  class Services;

  void schedule(double t, EventType type, NodeId node, std::uint64_t ref = 0);
  void dispatch(const Event& ev);
  void emit(TraceRecord rec);

  // Mobility.
  void schedule_transition(NodeId id);
  void on_transition(NodeId id, std::uint64_t generation);

  // Energy.
  double current_energy(const Node& n) const;
  void settle_idle(Node& n);
  void debit(NodeId id, EnergyUse use, std::uint64_t bits, double* drawn);
  void die(NodeId id, const char* reason);
  void reschedule_death(NodeId id);

  // MAC and channel.
  void enqueue(NodeId id, std::shared_ptr<Frame> frame);
  void schedule_attempt(NodeId id, bool allow_immediate);
  void on_mac_attempt(NodeId id);
  bool medium_busy(const Node& n) const;
  void transmit(NodeId id, std::shared_ptr<Frame> frame);
  void on_tx_end(NodeId id, std::uint64_t frame_id);
  void on_rx_end(NodeId id, std::uint64_t reception_id);
  bool cancel_queued(NodeId id, const DiscoveryKey& key);
  void report_unicast(const Frame& f, bool delivered);
  /// Missed ack: requeue a copy at the head of the sender's queue, or give up.
  void ack_missing(const Frame& f);

  // Traffic.
  void on_traffic(NodeId id);
  void generate_data(NodeId id);

  ScenarioConfig cfg_;
  std::uint64_t seed_;
  MobilityConfig mobility_;
  RadioModel radio_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_frame_ = 1;
  std::uint64_t next_reception_ = 1;
  TimerId next_timer_ = 1;
  std::unordered_map<TimerId, std::pair<NodeId, TimerTag>> timers_;
  std::unordered_map<std::uint64_t, std::shared_ptr<Frame>> in_flight_;
  struct Scripted {
    Packet packet;
    NodeId to = kNoNode;
    bool immediate = true;
  };
  std::vector<Scripted> scripted_;
  double now_ = 0.0;
  bool finished_ = false;
  std::uint64_t processed_ = 0;
  std::vector<TraceRecord> trace_;
};

}  // namespace rlpr
