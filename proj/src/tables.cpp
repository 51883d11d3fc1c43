#include "rlpr/tables.hpp"

#include <algorithm>

namespace rlpr {

void NeighborTable::upsert(const NeighborRecord& rec) {
  if (rec.id == self_) return;
  entries_[rec.id] = rec;
}

const NeighborRecord* NeighborTable::find(NodeId id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<NodeId> NeighborTable::expire(double now, double horizon) {
  std::vector<NodeId> gone;
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (now - it->second.last_heard >= horizon) {
      gone.push_back(it->first);
      it = entries_.erase(it);
    } else {
      ++it;
    }
  }
  return gone;
}

std::optional<double> NeighborTable::next_expiry(double horizon) const {
  std::optional<double> best;
  for (const auto& [id, rec] : entries_) {
    const double t = rec.last_heard + horizon;
    if (!best || t < *best) best = t;
  }
  return best;
}

void FrontRelativeTable::set(NodeId id, bool member) {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  const bool present = it != ids_.end() && *it == id;
  if (member && !present) ids_.insert(it, id);
  if (!member && present) ids_.erase(it);
}

bool FrontRelativeTable::contains(NodeId id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

void FrontRelativeTable::retain(const NeighborTable& neighbors) {
  std::erase_if(ids_, [&](NodeId id) { return !neighbors.contains(id); });
}

const ReverseEntry* RouteTables::reverse(const DiscoveryKey& key) const {
  auto it = reverse_.find(key);
  return it == reverse_.end() ? nullptr : &it->second;
}

const ForwardEntry* RouteTables::forward(NodeId dest, double now) const {
  auto it = forward_.find(dest);
  if (it == forward_.end() || it->second.expires <= now) return nullptr;
  return &it->second;
}

void RouteTables::refresh_forward(NodeId dest, double expires) {
  auto it = forward_.find(dest);
  if (it != forward_.end()) it->second.expires = std::max(it->second.expires, expires);
}

std::vector<NodeId> RouteTables::invalidate_via(NodeId hop) {
  std::vector<NodeId> dests;
  for (auto it = forward_.begin(); it != forward_.end();) {
    if (it->second.next_hop == hop) {
      dests.push_back(it->first);
      it = forward_.erase(it);
    } else {
      ++it;
    }
  }
  return dests;
}

void RouteTables::prune_reverse(double now, double max_age) {
  std::erase_if(reverse_, [&](const auto& kv) { return now - kv.second.created > max_age; });
}

bool DuplicateCache::insert(const DiscoveryKey& key) {
  if (contains(key)) return false;
  order_.push_back(key);
  index_[key] = std::prev(order_.end());
  while (index_.size() > capacity_) {
    index_.erase(order_.front());
    order_.pop_front();
  }
  return true;
}

}  // namespace rlpr
