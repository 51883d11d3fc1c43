#pragma once

#include "rlpr/geometry.hpp"

namespace rlpr {

struct ZoneConfig {
  double half_angle_deg = 90.0;    // zone = directions within this angle of the destination
  double energy_threshold = 10.0;  // T_E, inclusive
};

struct ContentionConfig {
  double slot = 0.010;         // seconds of delay per unit of composite metric
  double jitter_unit = 5e-6;   // seconds per node-id step, keeps equal metrics apart
};

/// Angle at `prev_hop` between the direction to `dest` and the direction to
/// `candidate`, in degrees within [0, 180]. Throws DegenerateGeometry when
/// either direction is undefined.
double forwarding_angle(Position prev_hop, Position candidate, Position dest);

/// Inclusive on both the angle bound and the energy threshold.
bool in_forwarding_zone(double angle_deg, double energy, const ZoneConfig& cfg);

/// |1 - (dp - dn) / r| where dp, dn are the previous hop's and the candidate's
/// distances to the destination. Progress is clamped to one range (so the
/// result stays in [0, 2]) when stale positions break the triangle bound.
double geographic_distance_metric(double dp, double dn, double r);

/// |v_prev - v_recv| / v_max, clamped to [0, 1].
double relative_speed_metric(double v_prev, double v_recv, double v_max);

inline double composite_metric(double gd, double vrl, double alpha, double beta) {
  return alpha * gd + beta * vrl;
}

/// Timer delay for a candidate: linear in the metric plus an id-ordered
/// sub-slot offset. Always > 0.
double contention_delay(double metric, NodeId node, const ContentionConfig& cfg);

}  // namespace rlpr
