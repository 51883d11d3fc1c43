#include "rlpr/messages.hpp"

#include <array>
#include <bit>
#include <cstring>

namespace rlpr {

namespace {

constexpr std::array<std::string_view, kMsgKindCount> kKindNames = {
    "HELLO", "ZOOM", "RLRQ", "RLRP", "RREQ", "RREP", "RERR", "DATA"};

class Writer {
 public:
  explicit Writer(std::size_t reserve) { out_.reserve(reserve); }

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void pos(Vec2 v) {
    f64(v.x);
    f64(v.y);
  }
  void zeros(std::size_t n) { out_.insert(out_.end(), n, 0); }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  double f64() { return std::bit_cast<double>(le(8)); }
  Vec2 pos() {
    const double x = f64();
    const double y = f64();
    return {x, y};
  }
  void skip(std::size_t n) {
    need(n);
    at_ += n;
  }
  void finish() const {
    if (at_ != in_.size()) throw WireError("trailing bytes after message");
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - at_ < n) throw WireError("truncated message");
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[at_ + i]) << (8 * i);
    at_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t at_ = 0;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::uint8_t code(WireType t) { return static_cast<std::uint8_t>(t); }

}  // namespace

std::string_view to_string(MsgKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<MsgKind> msg_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<MsgKind>(i);
  }
  return std::nullopt;
}

std::size_t wire_size(const Packet& p) {
  return std::visit(
      Overloaded{
          [](const HelloMessage&) -> std::size_t { return 1 + 4 + 6 * 8; },
          [](const RlrqMessage& m) -> std::size_t {
            return 1 + 4 * 4 + 3 * 8 + 2 + 4 * m.front_relatives.size() + 2;
          },
          [](const RlrpMessage&) -> std::size_t { return 1 + 4 * 4; },
          [](const RreqMessage&) -> std::size_t { return 1 + 1 + 5 * 4; },
          [](const RrepMessage&) -> std::size_t { return 1 + 1 + 5 * 4; },
          [](const RarpRequest&) -> std::size_t { return 1 + 1 + 3 * 4 + 6 * 8; },
          [](const RerrMessage&) -> std::size_t { return 1 + 3 * 4; },
          [](const DataPacket& d) -> std::size_t {
            return 1 + 3 * 4 + 2 + 8 + 2 + d.payload_bytes;
          },
      },
      p);
}

std::vector<std::uint8_t> encode(const Packet& p) {
  Writer w(wire_size(p));
  std::visit(Overloaded{
                 [&](const HelloMessage& m) {
                   w.u8(code(m.zoom_out ? WireType::ZoomOut : WireType::Hello));
                   w.u32(m.sender_id);
                   w.pos(m.position);
                   w.f64(m.speed);
                   w.f64(m.residual_energy);
                   w.f64(m.distance_to_dest);
                   w.f64(m.timestamp);
                 },
                 [&](const RlrqMessage& m) {
                   if (m.front_relatives.size() > 0xffff) throw WireError("front list too long");
                   w.u8(code(WireType::Rlrq));
                   w.u32(m.source_id);
                   w.u32(m.dest_id);
                   w.u32(m.broadcast_id);
                   w.u32(m.prev_hop_id);
                   w.pos(m.prev_hop_position);
                   w.f64(m.prev_hop_speed);
                   w.u16(static_cast<std::uint16_t>(m.front_relatives.size()));
                   for (NodeId id : m.front_relatives) w.u32(id);
                   w.u16(m.hop_count);
                 },
                 [&](const RlrpMessage& m) {
                   w.u8(code(WireType::Rlrp));
                   w.u32(m.source_id);
                   w.u32(m.dest_id);
                   w.u32(m.broadcast_id);
                   w.u32(m.next_hop_id);
                 },
                 [&](const RreqMessage& m) {
                   w.u8(code(WireType::Rreq));
                   w.u8(m.hop_count);
                   w.u32(m.broadcast_id);
                   w.u32(m.dest_id);
                   w.u32(m.dest_seq);
                   w.u32(m.source_id);
                   w.u32(m.source_seq);
                 },
                 [&](const RrepMessage& m) {
                   w.u8(code(WireType::Rrep));
                   w.u8(m.hop_count);
                   w.u32(m.dest_id);
                   w.u32(m.dest_seq);
                   w.u32(m.source_id);
                   w.u32(m.broadcast_id);
                   w.u32(m.next_hop_id);
                 },
                 [&](const RarpRequest& m) {
                   w.u8(code(WireType::RarpRreq));
                   w.u8(m.hop_count);
                   w.u32(m.broadcast_id);
                   w.u32(m.dest_id);
                   w.u32(m.source_id);
                   w.f64(m.min_ect);
                   w.f64(m.min_energy);
                   w.pos(m.prev_position);
                   w.pos(m.prev_velocity);
                 },
                 [&](const RerrMessage& m) {
                   w.u8(code(WireType::Rerr));
                   w.u32(m.dest_id);
                   w.u32(m.source_id);
                   w.u32(m.unreachable_id);
                 },
                 [&](const DataPacket& m) {
                   w.u8(code(WireType::Data));
                   w.u32(m.source_id);
                   w.u32(m.dest_id);
                   w.u32(m.seq);
                   w.u16(m.hop_count);
                   w.f64(m.created);
                   w.u16(m.payload_bytes);
                   w.zeros(m.payload_bytes);
                 },
             },
             p);
  return w.take();
}

Packet decode(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto type = static_cast<WireType>(r.u8());
  Packet out;
  switch (type) {
    case WireType::Hello:
    case WireType::ZoomOut: {
      HelloMessage m;
      m.zoom_out = type == WireType::ZoomOut;
      m.sender_id = r.u32();
      m.position = r.pos();
      m.speed = r.f64();
      m.residual_energy = r.f64();
      m.distance_to_dest = r.f64();
      m.timestamp = r.f64();
      out = m;
      break;
    }
    case WireType::Rlrq: {
      RlrqMessage m;
      m.source_id = r.u32();
      m.dest_id = r.u32();
      m.broadcast_id = r.u32();
      m.prev_hop_id = r.u32();
      m.prev_hop_position = r.pos();
      m.prev_hop_speed = r.f64();
      const std::uint16_t n = r.u16();
      m.front_relatives.reserve(n);
      for (std::uint16_t i = 0; i < n; ++i) m.front_relatives.push_back(r.u32());
      m.hop_count = r.u16();
      out = std::move(m);
      break;
    }
    case WireType::Rlrp: {
      RlrpMessage m;
      m.source_id = r.u32();
      m.dest_id = r.u32();
      m.broadcast_id = r.u32();
      m.next_hop_id = r.u32();
      out = m;
      break;
    }
    case WireType::Rreq: {
      RreqMessage m;
      m.hop_count = r.u8();
      m.broadcast_id = r.u32();
      m.dest_id = r.u32();
      m.dest_seq = r.u32();
      m.source_id = r.u32();
      m.source_seq = r.u32();
      out = m;
      break;
    }
    case WireType::Rrep: {
      RrepMessage m;
      m.hop_count = r.u8();
      m.dest_id = r.u32();
      m.dest_seq = r.u32();
      m.source_id = r.u32();
      m.broadcast_id = r.u32();
      m.next_hop_id = r.u32();
      out = m;
      break;
    }
    case WireType::RarpRreq: {
      RarpRequest m;
      m.hop_count = r.u8();
      m.broadcast_id = r.u32();
      m.dest_id = r.u32();
      m.source_id = r.u32();
      m.min_ect = r.f64();
      m.min_energy = r.f64();
      m.prev_position = r.pos();
      m.prev_velocity = r.pos();
      out = m;
      break;
    }
    case WireType::Rerr: {
      RerrMessage m;
      m.dest_id = r.u32();
      m.source_id = r.u32();
      m.unreachable_id = r.u32();
      out = m;
      break;
    }
    case WireType::Data: {
      DataPacket m;
      m.source_id = r.u32();
      m.dest_id = r.u32();
      m.seq = r.u32();
      m.hop_count = r.u16();
      m.created = r.f64();
      m.payload_bytes = r.u16();
      r.skip(m.payload_bytes);
      out = m;
      break;
    }
    default:
      throw WireError("unknown message type code");
  }
  r.finish();
  return out;
}

MsgKind kind_of(const Packet& p) {
  return std::visit(Overloaded{
                        [](const HelloMessage& m) {
                          return m.zoom_out ? MsgKind::ZoomOut : MsgKind::Hello;
                        },
                        [](const RlrqMessage&) { return MsgKind::Rlrq; },
                        [](const RlrpMessage&) { return MsgKind::Rlrp; },
                        [](const RreqMessage&) { return MsgKind::Rreq; },
                        [](const RrepMessage&) { return MsgKind::Rrep; },
                        [](const RarpRequest&) { return MsgKind::Rreq; },
                        [](const RerrMessage&) { return MsgKind::Rerr; },
                        [](const DataPacket&) { return MsgKind::Data; },
                    },
                    p);
}

std::optional<DiscoveryTag> discovery_tag(const Packet& p) {
  return std::visit(
      Overloaded{
          [](const RlrqMessage& m) -> std::optional<DiscoveryTag> {
            return DiscoveryTag{m.source_id, m.broadcast_id};
          },
          [](const RlrpMessage& m) -> std::optional<DiscoveryTag> {
            return DiscoveryTag{m.source_id, m.broadcast_id};
          },
          [](const RreqMessage& m) -> std::optional<DiscoveryTag> {
            return DiscoveryTag{m.source_id, m.broadcast_id};
          },
          [](const RrepMessage& m) -> std::optional<DiscoveryTag> {
            return DiscoveryTag{m.source_id, m.broadcast_id};
          },
          [](const RarpRequest& m) -> std::optional<DiscoveryTag> {
            return DiscoveryTag{m.source_id, m.broadcast_id};
          },
          [](const auto&) -> std::optional<DiscoveryTag> { return std::nullopt; },
      },
      p);
}

}  // namespace rlpr
