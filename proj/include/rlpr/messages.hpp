#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

#include "rlpr/geometry.hpp"

namespace rlpr {

using BroadcastId = std::uint32_t;

// Wire type codes. Every frame starts with one of these as a u8.
enum class WireType : std::uint8_t {
  Hello = 1,
  ZoomOut = 2,
  Rlrq = 3,
  Rlrp = 4,
  Rreq = 5,
  Rrep = 6,
  RarpRreq = 7,
  Rerr = 9,
  Data = 10,
};

// Accounting category used by traces and metric ledgers.
enum class MsgKind : std::uint8_t { Hello, ZoomOut, Rlrq, Rlrp, Rreq, Rrep, Rerr, Data };

inline constexpr std::size_t kMsgKindCount = 8;

std::string_view to_string(MsgKind kind);
std::optional<MsgKind> msg_kind_from_string(std::string_view s);
inline constexpr bool is_control(MsgKind k) { return k != MsgKind::Data; }

struct HelloMessage {
  NodeId sender_id = kNoNode;
  Position position;
  double speed = 0.0;
  double residual_energy = 0.0;
  double distance_to_dest = 0.0;
  double timestamp = 0.0;
  bool zoom_out = false;  // carried in the type code, not a separate field
};

struct RlrqMessage {
  NodeId source_id = kNoNode;
  NodeId dest_id = kNoNode;
  BroadcastId broadcast_id = 0;
  NodeId prev_hop_id = kNoNode;
  Position prev_hop_position;
  double prev_hop_speed = 0.0;
  std::vector<NodeId> front_relatives;
  std::uint16_t hop_count = 0;
};

struct RlrpMessage {
  NodeId source_id = kNoNode;
  NodeId dest_id = kNoNode;
  BroadcastId broadcast_id = 0;
  NodeId next_hop_id = kNoNode;
};

// AODV route request (RFC 3561 field set without flags).
struct RreqMessage {
  std::uint8_t hop_count = 0;
  BroadcastId broadcast_id = 0;
  NodeId dest_id = kNoNode;
  std::uint32_t dest_seq = 0;
  NodeId source_id = kNoNode;
  std::uint32_t source_seq = 0;
};

// Route reply shared by AODV and RARP-lite. Carries the request's
// (source, broadcast id) so relays can find their reverse entry.
struct RrepMessage {
  std::uint8_t hop_count = 0;
  NodeId dest_id = kNoNode;
  std::uint32_t dest_seq = 0;
  NodeId source_id = kNoNode;
  BroadcastId broadcast_id = 0;
  NodeId next_hop_id = kNoNode;
};

// RARP-lite route request: AODV-style flood carrying the running minimum of
// per-link expected connection time and the sender's kinematic state.
struct RarpRequest {
  std::uint8_t hop_count = 0;
  BroadcastId broadcast_id = 0;
  NodeId dest_id = kNoNode;
  NodeId source_id = kNoNode;
  double min_ect = 0.0;     // seconds, may be +inf
  double min_energy = 0.0;  // joules over relays so far, +inf before the first relay
  Position prev_position;
  Velocity prev_velocity;
};

struct RerrMessage {
  NodeId dest_id = kNoNode;
  NodeId source_id = kNoNode;
  NodeId unreachable_id = kNoNode;
};

struct DataPacket {
  NodeId source_id = kNoNode;
  NodeId dest_id = kNoNode;
  std::uint32_t seq = 0;
  std::uint16_t hop_count = 0;
  double created = 0.0;
  std::uint16_t payload_bytes = 512;
};

using Packet = std::variant<HelloMessage, RlrqMessage, RlrpMessage, RreqMessage, RrepMessage,
                            RarpRequest, RerrMessage, DataPacket>;

struct WireError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Encoded size in bytes (network-layer frame, excluding MAC overhead).
std::size_t wire_size(const Packet& p);

std::vector<std::uint8_t> encode(const Packet& p);

/// Throws WireError on truncated input, trailing bytes or an unknown type code.
Packet decode(std::span<const std::uint8_t> bytes);

MsgKind kind_of(const Packet& p);

/// (source, broadcast id) of the discovery a request/reply belongs to.
struct DiscoveryTag {
  NodeId source = kNoNode;
  BroadcastId broadcast_id = 0;
  auto operator<=>(const DiscoveryTag&) const = default;
};
std::optional<DiscoveryTag> discovery_tag(const Packet& p);

}  // namespace rlpr
