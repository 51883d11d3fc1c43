#pragma once

// Reference counts for a single route discovery on a static layout, computed
// without the protocol or engine code. Used to cross-check simulated traces.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "rlpr/geometry.hpp"
#include "rlpr/messages.hpp"

namespace rlpr::testing {

struct StaticLayout {
  std::vector<Position> positions;
  std::vector<double> energies;  // destination entry ignored
  NodeId source = 1;
  NodeId dest = 0;
};

/// Flooding: every node reached from the source transmits the request once,
/// except the destination, which answers instead. Nodes with no energy are absent.
inline std::size_t flood_request_count(const StaticLayout& l, double range) {
  const std::size_t n = l.positions.size();
  auto alive = [&](std::size_t i) { return i == l.dest || l.energies[i] > 0.0; };
  std::vector<bool> reached(n, false);
  std::queue<std::size_t> q;
  reached[l.source] = true;
  q.push(l.source);
  std::size_t count = 0;
  while (!q.empty()) {
    const std::size_t i = q.front();
    q.pop();
    if (i == l.dest) continue;
    ++count;
    for (std::size_t j = 0; j < n; ++j) {
      if (reached[j] || !alive(j)) continue;
      if (distance(l.positions[i], l.positions[j]) <= range) {
        reached[j] = true;
        q.push(j);
      }
    }
  }
  return count;
}

struct ContentionParams {
  double range = 250.0;
  double energy_threshold = 10.0;
  double zone_half_angle = 90.0;
  double alpha = 0.5;  // weight of geographic progress; speeds are zero here
  double slot = 0.010;
  double jitter = 5e-6;
  double preamble = 192e-6;
  double data_rate = 2e6;
  double mac_overhead = 28;
};

/// Timed abstract run of the zone-restricted contention: a node that accepts
/// the request waits slot * metric + jitter * (id + 1) after reception, and
/// stays silent if any node in range started rebroadcasting the same request
/// before its own fire time. Returns the number of request transmissions,
/// the source's included.
inline std::size_t contention_request_count(const StaticLayout& l, const ContentionParams& p) {
  const std::size_t n = l.positions.size();
  const Position dpos = l.positions[l.dest];
  constexpr double c = 299792458.0;
  constexpr double kPi = 3.14159265358979323846;

  auto in_range = [&](std::size_t a, std::size_t b) {
    return distance(l.positions[a], l.positions[b]) <= p.range;
  };
  auto energy_ok = [&](std::size_t i) {
    return i == l.dest || l.energies[i] >= p.energy_threshold;
  };
  // Members of i's zone: neighbours within the half angle of the direction
  // to the destination that are above the energy threshold.
  auto zone_of = [&](std::size_t i) {
    std::vector<std::size_t> out;
    const Position a = l.positions[i];
    const double tx = dpos.x - a.x, ty = dpos.y - a.y;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !in_range(i, j) || !energy_ok(j)) continue;
      const double cx = l.positions[j].x - a.x, cy = l.positions[j].y - a.y;
      const double na = std::hypot(tx, ty), nb = std::hypot(cx, cy);
      if (na == 0.0 || nb == 0.0) continue;
      const double cosv = std::clamp((tx * cx + ty * cy) / (na * nb), -1.0, 1.0);
      if (std::acos(cosv) * 180.0 / kPi <= p.zone_half_angle) out.push_back(j);
    }
    return out;
  };
  auto airtime = [&](std::size_t zone_size) {
    RlrqMessage m;
    m.front_relatives.assign(zone_size, 0);
    const double bytes = static_cast<double>(wire_size(Packet{m})) + p.mac_overhead;
    return p.preamble + bytes * 8.0 / p.data_rate;
  };

  struct Ev {
    double t;
    int kind;  // 0 = fire, 1 = reception end
    std::size_t node;
    std::size_t from;
    bool operator>(const Ev& o) const {
      if (t != o.t) return t > o.t;
      if (kind != o.kind) return kind > o.kind;
      return node > o.node;
    }
  };
  std::priority_queue<Ev, std::vector<Ev>, std::greater<>> q;
  std::vector<bool> seen(n, false), pending(n, false);
  std::vector<double> busy_until(n, -1.0);
  std::vector<std::vector<std::size_t>> zones(n);
  for (std::size_t i = 0; i < n; ++i) zones[i] = zone_of(i);

  std::size_t transmissions = 0;
  auto transmit = [&](std::size_t i, double t) {
    ++transmissions;
    const double air = airtime(zones[i].size());
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !in_range(i, j)) continue;
      const double end = t + distance(l.positions[i], l.positions[j]) / c + air;
      busy_until[j] = std::max(busy_until[j], end);
      q.push({end, 1, j, i});
    }
  };

  seen[l.source] = true;
  transmit(l.source, 0.0);
  while (!q.empty()) {
    const Ev ev = q.top();
    q.pop();
    const std::size_t j = ev.node;
    if (ev.kind == 0) {
      if (!pending[j]) continue;
      pending[j] = false;
      if (ev.t < busy_until[j]) continue;  // deferred, then cancelled by the duplicate
      transmit(j, ev.t);
      continue;
    }
    if (!energy_ok(j)) continue;
    if (seen[j]) {
      pending[j] = false;
      continue;
    }
    if (j == l.dest) {
      seen[j] = true;
      continue;
    }
    const auto& z = zones[ev.from];
    if (std::find(z.begin(), z.end(), j) == z.end()) continue;
    seen[j] = true;
    const double dp = distance(l.positions[ev.from], dpos);
    const double dn = distance(l.positions[j], dpos);
    const double progress = std::clamp(dp - dn, -p.range, p.range);
    const double gd = std::abs(1.0 - progress / p.range);
    const double delay = p.slot * p.alpha * gd + p.jitter * (static_cast<double>(j) + 1.0);
    pending[j] = true;
    q.push({ev.t + delay, 0, j, ev.from});
  }
  return transmissions;
}

}  // namespace rlpr::testing
