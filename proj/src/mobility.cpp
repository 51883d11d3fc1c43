#include "rlpr/mobility.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace rlpr {

Velocity MobilityState::velocity() const {
  if (paused()) return {};
  const Vec2 d = waypoint - position;
  const double n = d.norm();
  if (n == 0.0) return {};
  return d * (speed / n);
}

void draw_leg(MobilityState& state, const MobilityConfig& cfg, SeededGenerator& rng) {
  state.waypoint = {rng.uniform(0.0, cfg.area_width), rng.uniform(0.0, cfg.area_height)};
  state.speed = cfg.speed_max > cfg.speed_min ? rng.uniform(cfg.speed_min, cfg.speed_max)
                                              : cfg.speed_min;
  state.pause_remaining = 0.0;
}

MobilityState initial_mobility(const MobilityConfig& cfg, SeededGenerator& rng) {
  MobilityState s;
  s.position = {rng.uniform(0.0, cfg.area_width), rng.uniform(0.0, cfg.area_height)};
  draw_leg(s, cfg, rng);
  return s;
}

double time_to_transition(const MobilityState& state) {
  if (state.stationary) return std::numeric_limits<double>::infinity();
  if (state.pause_remaining > 0.0) return state.pause_remaining;
  if (!(state.speed > 0.0)) return std::numeric_limits<double>::infinity();
  return distance(state.position, state.waypoint) / state.speed;
}

Position position_after(const MobilityState& state, double dt) {
  if (state.paused() || dt <= 0.0) return state.position;
  const Vec2 to_go = state.waypoint - state.position;
  const double dist = to_go.norm();
  const double reach = state.speed * dt;
  if (dist == 0.0 || reach >= dist) return state.waypoint;
  return state.position + to_go * (reach / dist);
}

void complete_transition(MobilityState& state, const MobilityConfig& cfg, SeededGenerator& rng) {
  if (state.stationary) return;
  if (state.pause_remaining > 0.0) {
    draw_leg(state, cfg, rng);
    return;
  }
  state.position = state.waypoint;
  if (cfg.pause_time > 0.0) {
    state.pause_remaining = cfg.pause_time;
  } else {
    draw_leg(state, cfg, rng);
  }
}

MobilityState advance_waypoint(MobilityState state, const MobilityConfig& cfg,
                               SeededGenerator& rng, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("advance_waypoint: dt must be positive");
  if (state.stationary) return state;

  double left = dt;
  // Each iteration consumes a pause or a leg; bounded because speed > 0.
  while (left > 0.0) {
    const double due = time_to_transition(state);
    if (left < due) {
      if (state.pause_remaining > 0.0) {
        state.pause_remaining -= left;
      } else {
        state.position = position_after(state, left);
      }
      break;
    }
    left -= due;
    complete_transition(state, cfg, rng);
  }
  state.position.x = std::clamp(state.position.x, 0.0, cfg.area_width);
  state.position.y = std::clamp(state.position.y, 0.0, cfg.area_height);
  return state;
}

}  // namespace rlpr
