#include "rlpr/routing_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlpr {

double forwarding_angle(Position prev_hop, Position candidate, Position dest) {
  return angle_between_deg(prev_hop, dest, candidate);
}

bool in_forwarding_zone(double angle_deg, double energy, const ZoneConfig& cfg) {
  return energy >= cfg.energy_threshold && angle_deg <= cfg.half_angle_deg;
}

double geographic_distance_metric(double dp, double dn, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("geographic distance: range must be positive");
  const double progress = std::clamp(dp - dn, -r, r);
  return std::abs(1.0 - progress / r);
}

double relative_speed_metric(double v_prev, double v_recv, double v_max) {
  if (!(v_max > 0.0)) throw std::invalid_argument("relative speed: v_max must be positive");
  return std::min(1.0, std::abs(v_prev - v_recv) / v_max);
}

double contention_delay(double metric, NodeId node, const ContentionConfig& cfg) {
  if (metric < 0.0) throw std::invalid_argument("contention delay: negative metric");
  return cfg.slot * metric + cfg.jitter_unit * (static_cast<double>(node) + 1.0);
}

}  // namespace rlpr
