#pragma once

#include <cstddef>
#include <list>
#include <map>
#include <optional>
#include <vector>

#include "rlpr/geometry.hpp"
#include "rlpr/messages.hpp"

namespace rlpr {

/// Identifies one route-discovery attempt network-wide.
struct DiscoveryKey {
  NodeId source = kNoNode;
  NodeId dest = kNoNode;
  BroadcastId broadcast_id = 0;
  auto operator<=>(const DiscoveryKey&) const = default;
};

struct NeighborRecord {
  NodeId id = kNoNode;
  Position position;
  double speed = 0.0;
  double energy = 0.0;
  double last_heard = 0.0;
};

class NeighborTable {
 public:
  explicit NeighborTable(NodeId self) : self_(self) {}

  /// Inserts or refreshes; records for `self` are ignored.
  void upsert(const NeighborRecord& rec);
  bool contains(NodeId id) const { return entries_.count(id) != 0; }
  const NeighborRecord* find(NodeId id) const;
  void erase(NodeId id) { entries_.erase(id); }

  /// Removes entries not heard within `horizon` seconds; returns their ids.
  std::vector<NodeId> expire(double now, double horizon);

  /// Earliest time at which some entry would become stale, if any.
  std::optional<double> next_expiry(double horizon) const;

  std::size_t size() const { return entries_.size(); }
  const std::map<NodeId, NeighborRecord>& entries() const { return entries_; }

 private:
  NodeId self_;
  std::map<NodeId, NeighborRecord> entries_;
};

/// Neighbors inside the node's forwarding zone with energy at or above T_E.
/// Always a subset of the owning node's NeighborTable.
class FrontRelativeTable {
 public:
  void set(NodeId id, bool member);
  bool contains(NodeId id) const;
  void erase(NodeId id) { set(id, false); }
  /// Drops members that are no longer in `neighbors`.
  void retain(const NeighborTable& neighbors);
  const std::vector<NodeId>& members() const { return ids_; }

 private:
  std::vector<NodeId> ids_;  // sorted
};

struct ReverseEntry {
  NodeId predecessor = kNoNode;
  std::uint16_t hop_count = 0;
  double created = 0.0;
};

struct ForwardEntry {
  NodeId next_hop = kNoNode;
  std::uint16_t hop_count = 0;
  double expires = 0.0;
};

/// Per-discovery reverse pointers toward the source and per-destination
/// forward next hops.
class RouteTables {
 public:
  void set_reverse(const DiscoveryKey& key, const ReverseEntry& e) { reverse_[key] = e; }
  const ReverseEntry* reverse(const DiscoveryKey& key) const;

  void set_forward(NodeId dest, const ForwardEntry& e) { forward_[dest] = e; }
  /// Valid (unexpired) forward entry for dest, or nullptr.
  const ForwardEntry* forward(NodeId dest, double now) const;
  void refresh_forward(NodeId dest, double expires);
  void invalidate_forward(NodeId dest) { forward_.erase(dest); }
  /// Removes every forward entry whose next hop is `hop`; returns affected destinations.
  std::vector<NodeId> invalidate_via(NodeId hop);

  /// Drops reverse entries older than `max_age`.
  void prune_reverse(double now, double max_age);
  std::size_t reverse_size() const { return reverse_.size(); }

 private:
  std::map<DiscoveryKey, ReverseEntry> reverse_;
  std::map<NodeId, ForwardEntry> forward_;
};

/// Bounded least-recently-inserted set of discovery keys.
class DuplicateCache {
 public:
  explicit DuplicateCache(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  bool contains(const DiscoveryKey& key) const { return index_.count(key) != 0; }
  /// Returns false if the key was already present.
  bool insert(const DiscoveryKey& key);
  std::size_t size() const { return index_.size(); }

 private:
  std::size_t capacity_;
  std::list<DiscoveryKey> order_;
  std::map<DiscoveryKey, std::list<DiscoveryKey>::iterator> index_;
};

}  // namespace rlpr
