#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "rlpr/config.hpp"
#include "rlpr/geometry.hpp"
#include "rlpr/messages.hpp"
#include "rlpr/tables.hpp"
#include "rlpr/trace.hpp"

namespace rlpr {

enum class TimerKind : std::uint8_t {
  Hello,
  NeighborExpiry,
  Contention,
  DiscoveryTimeout,
  FloodRelay,
  RarpWindow,
  Holddown,
};

std::string_view to_string(TimerKind kind);

struct TimerTag {
  TimerKind kind = TimerKind::Hello;
  DiscoveryKey key;
};

using TimerId = std::uint64_t;
inline constexpr TimerId kNoTimer = 0;

struct FrameOptions {
  /// Frames tagged with a discovery key can be withdrawn from the MAC queue
  /// by cancel_queued() until they reach the air.
  std::optional<DiscoveryKey> suppress_key;
  /// Skip the initial random backoff when the medium is idle.
  bool immediate = false;
};

/// A protocol-level observation written to the trace by the engine.
struct ProtocolNote {
  TraceEvent ev = TraceEvent::Anomaly;
  std::optional<MsgKind> msg;
  NodeId peer = kNoNode;
  std::optional<DiscoveryTag> tag;
  double value = kNoValue;
  double cost = kNoValue;
  std::string reason;
};

/// What the engine offers to the routing logic running on one node.
class NodeServices {
 public:
  virtual ~NodeServices() = default;

  virtual NodeId self() const = 0;
  virtual double now() const = 0;
  virtual Position position() const = 0;
  virtual Velocity velocity() const = 0;
  virtual double residual_energy() const = 0;

  virtual void broadcast(Packet packet, FrameOptions opts = {}) = 0;
  /// Delivery outcome comes back through RoutingProtocol::on_unicast_result.
  virtual void unicast(Packet packet, NodeId to, FrameOptions opts = {}) = 0;
  /// Removes queued, not yet transmitted frames carrying `key`. True if any.
  virtual bool cancel_queued(const DiscoveryKey& key) = 0;

  virtual TimerId start_timer(double delay, TimerTag tag) = 0;
  virtual void cancel_timer(TimerId id) = 0;

  /// Uniform draw from the node's protocol stream.
  virtual double uniform(double lo, double hi) = 0;

  virtual void record(const ProtocolNote& note) = 0;
};

class RoutingProtocol {
 public:
  virtual ~RoutingProtocol() = default;

  virtual void start() = 0;
  virtual void on_timer(TimerId id, const TimerTag& tag) = 0;
  virtual void on_receive(const Packet& packet, NodeId from, double rssi) = 0;
  virtual void on_unicast_result(const Packet& packet, NodeId to, bool delivered) = 0;
  virtual void on_data_generated(const DataPacket& packet) = 0;

  /// Whether the node may put frames on the air (and acknowledge unicasts).
  virtual bool may_transmit() const = 0;
};

std::unique_ptr<RoutingProtocol> make_protocol(ProtocolKind kind, const ScenarioConfig& cfg,
                                               NodeServices& services);

}  // namespace rlpr
