#include <doctest.h>

#include <algorithm>

#include "rlpr/rng.hpp"
#include "rlpr/tables.hpp"

using namespace rlpr;

TEST_SUITE("tables") {

TEST_CASE("neighbor upsert refreshes a single entry") {
  NeighborTable t(1);
  t.upsert({2, {10, 10}, 3.0, 50.0, 1.0});
  t.upsert({2, {12, 10}, 3.0, 49.0, 2.0});
  t.upsert({1, {0, 0}, 0.0, 50.0, 2.0});  // self, ignored
  CHECK(t.size() == 1);
  REQUIRE(t.find(2) != nullptr);
  CHECK(t.find(2)->last_heard == 2.0);
  CHECK(t.find(2)->position.x == 12.0);
  CHECK_FALSE(t.contains(1));
}

TEST_CASE("neighbor expiry") {
  NeighborTable t(0);
  t.upsert({1, {}, 0, 50, 0.0});
  t.upsert({2, {}, 0, 50, 1.0});
  CHECK(t.next_expiry(2.5) == doctest::Approx(2.5));
  CHECK(t.expire(2.4, 2.5).empty());
  const auto lost = t.expire(3.0, 2.5);
  CHECK(lost == std::vector<NodeId>{1});
  CHECK(t.size() == 1);
  CHECK(t.next_expiry(2.5) == doctest::Approx(3.5));
}

TEST_CASE("front relatives stay a subset of the neighbor table") {
  SeededGenerator g(5, Stream::Setup, 0);
  NeighborTable n(0);
  FrontRelativeTable f;
  double now = 0.0;
  for (int step = 0; step < 5000; ++step) {
    now += 0.1;
    const NodeId id = static_cast<NodeId>(1 + g.below(20));
    if (g.unit() < 0.7) {
      n.upsert({id, {}, 0, 50, now});
      f.set(id, g.unit() < 0.5);
    }
    if (g.unit() < 0.1) {
      n.expire(now, 2.5);
      f.retain(n);
    }
    for (NodeId m : f.members()) REQUIRE(n.contains(m));
    REQUIRE(std::is_sorted(f.members().begin(), f.members().end()));
  }
}

TEST_CASE("route tables") {
  RouteTables r;
  r.set_forward(0, {4, 2, 10.0});
  r.set_forward(5, {4, 1, 10.0});
  r.set_forward(6, {3, 1, 10.0});
  CHECK(r.forward(0, 9.0) != nullptr);
  CHECK(r.forward(0, 10.5) == nullptr);
  r.refresh_forward(0, 20.0);
  CHECK(r.forward(0, 10.5) != nullptr);
  auto hit = r.invalidate_via(4);
  std::sort(hit.begin(), hit.end());
  CHECK(hit == std::vector<NodeId>{0, 5});
  CHECK(r.forward(6, 1.0) != nullptr);

  const DiscoveryKey k{1, 0, 3};
  r.set_reverse(k, {7, 1, 2.0});
  REQUIRE(r.reverse(k) != nullptr);
  CHECK(r.reverse(k)->predecessor == 7);
  r.prune_reverse(5.0, 10.0);
  CHECK(r.reverse_size() == 1);
  r.prune_reverse(13.0, 10.0);
  CHECK(r.reverse(k) == nullptr);
}

TEST_CASE("duplicate cache evicts the oldest key") {
  DuplicateCache c(2);
  CHECK(c.insert({1, 0, 1}));
  CHECK_FALSE(c.insert({1, 0, 1}));
  CHECK(c.insert({1, 0, 2}));
  CHECK(c.insert({1, 0, 3}));
  CHECK(c.size() == 2);
  CHECK_FALSE(c.contains({1, 0, 1}));
  CHECK(c.contains({1, 0, 3}));
}

}  // TEST_SUITE
