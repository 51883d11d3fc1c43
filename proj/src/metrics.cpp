#include "rlpr/metrics.hpp"

#include <cmath>
#include <map>

namespace rlpr {

namespace {

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool is_discovery_kind(MsgKind k) {
  return k == MsgKind::Rlrq || k == MsgKind::Rlrp || k == MsgKind::Rreq || k == MsgKind::Rrep;
}

}  // namespace

bool MetricLedger::operator==(const MetricLedger& o) const {
  if (tx_count != o.tx_count || tx_bytes != o.tx_bytes || node_count != o.node_count ||
      deaths != o.deaths || !same(first_death, o.first_death) || end_time != o.end_time ||
      data_generated != o.data_generated || data_delivered != o.data_delivered ||
      delay_sum != o.delay_sum || anomalies != o.anomalies ||
      discoveries.size() != o.discoveries.size()) {
    return false;
  }
  for (std::size_t i = 0; i < discoveries.size(); ++i) {
    const auto& a = discoveries[i];
    const auto& b = o.discoveries[i];
    if (a.source != b.source || a.bid != b.bid || a.start != b.start || !same(a.end, b.end) ||
        a.finished != b.finished || a.success != b.success || a.messages != b.messages) {
      return false;
    }
  }
  return true;
}

MetricLedger build_ledger(const std::vector<TraceRecord>& trace) {
  MetricLedger l;
  std::map<std::pair<NodeId, BroadcastId>, std::size_t> index;
  std::map<std::pair<NodeId, BroadcastId>, std::uint64_t> early;  // messages seen before start

  for (const auto& r : trace) {
    switch (r.ev) {
      case TraceEvent::Init:
        ++l.node_count;
        break;
      case TraceEvent::Tx:
        if (r.msg) {
          const auto k = static_cast<std::size_t>(*r.msg);
          ++l.tx_count[k];
          l.tx_bytes[k] += r.bytes;
          if (is_discovery_kind(*r.msg) && r.src != kNoNode && r.bid) {
            const auto key = std::make_pair(r.src, *r.bid);
            if (auto it = index.find(key); it != index.end()) {
              ++l.discoveries[it->second].messages;
            } else {
              ++early[key];
            }
          }
        }
        break;
      case TraceEvent::Death:
        ++l.deaths;
        if (std::isnan(l.first_death) || r.t < l.first_death) l.first_death = r.t;
        break;
      case TraceEvent::DiscStart:
        if (r.src != kNoNode && r.bid) {
          DiscoveryRecord d;
          d.source = r.src;
          d.bid = *r.bid;
          d.start = r.t;
          const auto key = std::make_pair(r.src, *r.bid);
          if (auto it = early.find(key); it != early.end()) d.messages = it->second;
          index[key] = l.discoveries.size();
          l.discoveries.push_back(d);
        }
        break;
      case TraceEvent::DiscEnd:
        if (r.src != kNoNode && r.bid) {
          if (auto it = index.find({r.src, *r.bid}); it != index.end()) {
            auto& d = l.discoveries[it->second];
            if (!d.finished) {
              d.finished = true;
              d.end = r.t;
              d.success = r.value == 1.0;
            }
          }
        }
        break;
      case TraceEvent::Generate:
        ++l.data_generated;
        break;
      case TraceEvent::Deliver:
        ++l.data_delivered;
        if (!std::isnan(r.value)) l.delay_sum += r.value;
        break;
      case TraceEvent::Anomaly:
        ++l.anomalies;
        break;
      case TraceEvent::End:
        l.end_time = std::max(l.end_time, r.t);
        break;
      default:
        break;
    }
  }
  return l;
}

std::uint64_t control_overhead(const MetricLedger& l) {
  std::uint64_t total = 0;
  for (std::size_t k = 0; k < kMsgKindCount; ++k) {
    if (is_control(static_cast<MsgKind>(k))) total += l.tx_count[k];
  }
  return total;
}

std::uint64_t control_overhead(const std::vector<TraceRecord>& trace) {
  return control_overhead(build_ledger(trace));
}

std::uint64_t discovery_overhead(const MetricLedger& l) {
  return control_overhead(l) - l.count(MsgKind::Hello) - l.count(MsgKind::ZoomOut);
}

std::uint64_t control_bytes(const MetricLedger& l) {
  std::uint64_t total = 0;
  for (std::size_t k = 0; k < kMsgKindCount; ++k) {
    if (is_control(static_cast<MsgKind>(k))) total += l.tx_bytes[k];
  }
  return total;
}

double network_lifetime(const MetricLedger& l) {
  return std::isnan(l.first_death) ? l.end_time : l.first_death;
}

double network_lifetime(const std::vector<TraceRecord>& trace) {
  return network_lifetime(build_ledger(trace));
}

std::optional<double> search_success_rate(const MetricLedger& l) {
  std::uint64_t messages = 0;
  double duration = 0.0;
  bool any = false;
  for (const auto& d : l.discoveries) {
    if (!d.success) continue;
    any = true;
    messages += d.messages;
    duration += d.end - d.start;
  }
  if (!any || !(duration > 0.0)) return std::nullopt;
  return static_cast<double>(messages) / duration;
}

std::optional<double> search_success_rate(const std::vector<TraceRecord>& trace) {
  return search_success_rate(build_ledger(trace));
}

std::uint64_t discovery_successes(const MetricLedger& l) {
  std::uint64_t n = 0;
  for (const auto& d : l.discoveries) n += d.success ? 1 : 0;
  return n;
}

std::uint64_t discovery_failures(const MetricLedger& l) {
  std::uint64_t n = 0;
  for (const auto& d : l.discoveries) n += (d.finished && !d.success) ? 1 : 0;
  return n;
}

std::optional<double> mean_discovery_latency(const MetricLedger& l) {
  double sum = 0.0;
  std::uint64_t n = 0;
  for (const auto& d : l.discoveries) {
    if (!d.success) continue;
    sum += d.end - d.start;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<double> mean_discovery_messages(const MetricLedger& l) {
  double sum = 0.0;
  std::uint64_t n = 0;
  for (const auto& d : l.discoveries) {
    if (!d.success) continue;
    sum += static_cast<double>(d.messages);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<double> delivery_ratio(const MetricLedger& l) {
  if (l.data_generated == 0) return std::nullopt;
  return static_cast<double>(l.data_delivered) / static_cast<double>(l.data_generated);
}

MetricRow metric_row(const MetricLedger& l) {
  auto num = [](std::uint64_t v) { return std::optional<double>(static_cast<double>(v)); };
  MetricRow row;
  row.emplace_back("control_overhead", num(control_overhead(l)));
  row.emplace_back("discovery_overhead", num(discovery_overhead(l)));
  for (std::size_t k = 0; k < kMsgKindCount; ++k) {
    const auto kind = static_cast<MsgKind>(k);
    if (!is_control(kind)) continue;
    std::string name = "tx_";
    for (char c : to_string(kind)) name.push_back(static_cast<char>(std::tolower(c)));
    row.emplace_back(name, num(l.tx_count[k]));
  }
  row.emplace_back("control_bytes", num(control_bytes(l)));
  row.emplace_back("network_lifetime", network_lifetime(l));
  row.emplace_back("deaths", num(l.deaths));
  row.emplace_back("search_success_rate", search_success_rate(l));
  row.emplace_back("discovery_successes", num(discovery_successes(l)));
  row.emplace_back("discovery_failures", num(discovery_failures(l)));
  row.emplace_back("discovery_latency", mean_discovery_latency(l));
  row.emplace_back("discovery_messages", mean_discovery_messages(l));
  row.emplace_back("delivery_ratio", delivery_ratio(l));
  return row;
}

std::vector<std::string> metric_names() {
  std::vector<std::string> names;
  for (const auto& [k, _] : metric_row(MetricLedger{})) names.push_back(k);
  return names;
}

}  // namespace rlpr
