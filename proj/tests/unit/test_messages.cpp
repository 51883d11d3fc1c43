#include <doctest.h>

#include <limits>

#include "rlpr/messages.hpp"

using namespace rlpr;

namespace {

std::vector<Packet> samples() {
  HelloMessage h{7, {120.5, 33.25}, 4.5, 61.0, 410.0, 12.75, false};
  HelloMessage z = h;
  z.zoom_out = true;
  RlrqMessage q{1, 0, 9, 4, {300, 500}, 5.5, {2, 3, 11}, 2};
  RlrpMessage p{1, 0, 9, 4};
  RreqMessage rq{3, 17, 0, 0, 5, 2};
  RrepMessage rp{2, 0, 1, 5, 17, 6};
  RarpRequest rr{1, 4, 0, 2, 42.5, 30.0, {10, 20}, {-1.5, 2.0}};
  RarpRequest fresh = rr;
  fresh.min_ect = std::numeric_limits<double>::infinity();
  fresh.min_energy = std::numeric_limits<double>::infinity();
  RerrMessage e{0, 1, 6};
  DataPacket d{1, 0, 44, 3, 17.5, 512};
  return {h, z, q, p, rq, rp, rr, fresh, e, d};
}

}  // namespace

TEST_SUITE("messages") {

TEST_CASE("every message survives an encode/decode round trip") {
  for (const auto& pkt : samples()) {
    const auto bytes = encode(pkt);
    CHECK(bytes.size() == wire_size(pkt));
    const Packet back = decode(bytes);
    CHECK(back.index() == pkt.index());
    CHECK(encode(back) == bytes);
    CHECK(kind_of(back) == kind_of(pkt));
  }
}

TEST_CASE("wire sizes") {
  CHECK(wire_size(HelloMessage{}) == 53);
  RlrqMessage q;
  CHECK(wire_size(q) == 45);
  q.front_relatives = {1, 2, 3};
  CHECK(wire_size(q) == 57);
  CHECK(wire_size(RlrpMessage{}) == 17);
  CHECK(wire_size(RreqMessage{}) == 22);
  CHECK(wire_size(RarpRequest{}) == 62);
  CHECK(wire_size(DataPacket{}) == 25 + 512);
}

TEST_CASE("zoom-out travels in the type code") {
  HelloMessage h;
  h.zoom_out = true;
  const auto bytes = encode(h);
  CHECK(bytes[0] == static_cast<std::uint8_t>(WireType::ZoomOut));
  CHECK(std::get<HelloMessage>(decode(bytes)).zoom_out);
  CHECK(kind_of(h) == MsgKind::ZoomOut);
}

TEST_CASE("malformed frames are rejected") {
  auto bytes = encode(RlrpMessage{1, 0, 2, 3});
  CHECK_THROWS_AS(decode(std::span(bytes).first(bytes.size() - 1)), WireError);
  bytes.push_back(0);
  CHECK_THROWS_AS(decode(bytes), WireError);
  std::vector<std::uint8_t> unknown{8, 0, 0};
  CHECK_THROWS_AS(decode(unknown), WireError);
  CHECK_THROWS_AS(decode(std::vector<std::uint8_t>{}), WireError);
}

TEST_CASE("discovery tags") {
  CHECK(discovery_tag(RlrqMessage{4, 0, 9}) == DiscoveryTag{4, 9});
  CHECK(discovery_tag(RrepMessage{0, 0, 0, 5, 17, 6}) == DiscoveryTag{5, 17});
  CHECK_FALSE(discovery_tag(HelloMessage{}).has_value());
  CHECK_FALSE(discovery_tag(DataPacket{}).has_value());
}

TEST_CASE("message kind names round trip") {
  for (std::size_t i = 0; i < kMsgKindCount; ++i) {
    const auto k = static_cast<MsgKind>(i);
    CHECK(msg_kind_from_string(to_string(k)) == k);
  }
  CHECK_FALSE(msg_kind_from_string("bogus").has_value());
}

}  // TEST_SUITE
