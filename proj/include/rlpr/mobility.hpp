#pragma once

#include "rlpr/geometry.hpp"
#include "rlpr/rng.hpp"

namespace rlpr {

inline constexpr double kmh_to_mps(double kmh) { return kmh / 3.6; }

struct MobilityConfig {
  double area_width = 1000.0;
  double area_height = 1000.0;
  double speed_min = kmh_to_mps(10.0);
  double speed_max = kmh_to_mps(25.0);
  double pause_time = 0.0;
};

/// Random-waypoint state of one node. A node is either travelling toward
/// `waypoint` at `speed`, or paused at it with `pause_remaining` > 0.
struct MobilityState {
  Position position;
  Position waypoint;
  double speed = 0.0;
  double pause_remaining = 0.0;
  bool stationary = false;

  bool paused() const { return stationary || pause_remaining > 0.0; }
  double current_speed() const { return paused() ? 0.0 : speed; }
  Velocity velocity() const;
};

/// Draws a fresh uniform waypoint and a uniform speed in [speed_min, speed_max).
void draw_leg(MobilityState& state, const MobilityConfig& cfg, SeededGenerator& rng);

/// Initial state: uniform position, first leg drawn immediately.
MobilityState initial_mobility(const MobilityConfig& cfg, SeededGenerator& rng);

/// Seconds until the node next reaches its waypoint or ends its pause;
/// infinity for stationary nodes.
double time_to_transition(const MobilityState& state);

/// Position after travelling dt seconds along the current leg, dt no later
/// than the next transition. Does not draw.
Position position_after(const MobilityState& state, double dt);

/// Applies the transition due now: arrival starts a pause (or the next leg
/// when pause_time is 0); the end of a pause draws the next leg.
void complete_transition(MobilityState& state, const MobilityConfig& cfg, SeededGenerator& rng);

/// Moves the node forward by dt seconds. On arrival the node pauses for
/// cfg.pause_time, then draws the next leg; leftover time carries over.
MobilityState advance_waypoint(MobilityState state, const MobilityConfig& cfg,
                               SeededGenerator& rng, double dt);

}  // namespace rlpr
