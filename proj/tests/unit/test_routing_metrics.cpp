#include <doctest.h>

#include "rlpr/rng.hpp"
#include "rlpr/routing_metrics.hpp"

using namespace rlpr;

TEST_SUITE("routing_metrics") {

TEST_CASE("forwarding angle") {
  const Position prev{0, 0}, dest{100, 0};
  CHECK(forwarding_angle(prev, {50, 0}, dest) == doctest::Approx(0.0));
  CHECK(forwarding_angle(prev, {0, 50}, dest) == doctest::Approx(90.0));
  CHECK(forwarding_angle(prev, {-50, 0}, dest) == doctest::Approx(180.0));
  CHECK(forwarding_angle(prev, {-50, 50}, dest) == doctest::Approx(135.0));
  CHECK_THROWS_AS(forwarding_angle(prev, prev, dest), DegenerateGeometry);
}

TEST_CASE("zone predicate is inclusive on both bounds") {
  const ZoneConfig z;
  CHECK(in_forwarding_zone(0.0, 50.0, z));
  CHECK(in_forwarding_zone(90.0, 50.0, z));
  CHECK_FALSE(in_forwarding_zone(90.01, 50.0, z));
  CHECK_FALSE(in_forwarding_zone(45.0, 9.9, z));
  CHECK(in_forwarding_zone(45.0, 10.0, z));
}

TEST_CASE("geographic distance metric") {
  CHECK(geographic_distance_metric(300, 300, 250) == doctest::Approx(1.0));
  CHECK(geographic_distance_metric(300, 50, 250) == 0.0);
  CHECK(geographic_distance_metric(300, 160, 250) == doctest::Approx(0.44));
  // Moving away by a full range doubles the penalty; beyond that it is clamped.
  CHECK(geographic_distance_metric(100, 350, 250) == doctest::Approx(2.0));
  CHECK(geographic_distance_metric(100, 900, 250) == doctest::Approx(2.0));
  CHECK_THROWS(geographic_distance_metric(1, 1, 0));
}

TEST_CASE("relative speed metric") {
  CHECK(relative_speed_metric(5.0, 5.0, 6.944) == 0.0);
  CHECK(relative_speed_metric(6.944, 0.0, 6.944) == doctest::Approx(1.0));
  CHECK(relative_speed_metric(6.4, 5.84, 6.944) == doctest::Approx(0.56 / 6.944));
  CHECK(relative_speed_metric(6.4, 5.84, 6.944) == doctest::Approx(0.0806).epsilon(1e-3));
  CHECK(relative_speed_metric(20.0, 0.0, 6.944) == 1.0);
  CHECK_THROWS(relative_speed_metric(1, 1, 0));
}

TEST_CASE("composite metric matches the worked values") {
  CHECK(composite_metric(0.44, 0.08, 0.5, 0.5) == doctest::Approx(0.26).epsilon(1e-12));
  CHECK(composite_metric(0.72, 0.16, 0.5, 0.5) == doctest::Approx(0.44).epsilon(1e-12));
  CHECK(composite_metric(0.0, 0.0, 0.5, 0.5) == 0.0);
}

TEST_CASE("contention delay ordering") {
  const ContentionConfig c;
  const double d6 = contention_delay(0.26, 6, c);
  const double d7 = contention_delay(0.44, 7, c);
  CHECK(d6 == doctest::Approx(0.0026 + 7 * 5e-6));
  CHECK(d7 == doctest::Approx(0.0044 + 8 * 5e-6));
  CHECK(d6 < d7);
  CHECK(contention_delay(0.0, 0, c) > 0.0);
  CHECK(contention_delay(0.3, 3, c) < contention_delay(0.3, 9, c));
  CHECK_THROWS(contention_delay(-0.1, 1, c));
}

TEST_CASE("metric ranges over random inputs") {
  SeededGenerator g(11, Stream::Setup, 0);
  for (int i = 0; i < 20000; ++i) {
    const double r = g.uniform(1.0, 500.0);
    const double dp = g.uniform(0.0, 1500.0);
    const double dn = g.uniform(0.0, 1500.0);
    const double gd = geographic_distance_metric(dp, dn, r);
    REQUIRE(gd >= 0.0);
    REQUIRE(gd <= 2.0);
    const double vmax = g.uniform(0.1, 20.0);
    const double vrl = relative_speed_metric(g.uniform(0, 30), g.uniform(0, 30), vmax);
    REQUIRE(vrl >= 0.0);
    REQUIRE(vrl <= 1.0);
    const double m = composite_metric(gd, vrl, 0.5, 0.5);
    REQUIRE(m <= 0.5 * 2 + 0.5 * 1);
  }
}

}  // TEST_SUITE
