#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rlpr/messages.hpp"
#include "rlpr/trace.hpp"

namespace rlpr {

struct DiscoveryRecord {
  NodeId source = kNoNode;
  BroadcastId bid = 0;
  double start = 0.0;
  double end = kNoValue;
  bool finished = false;
  bool success = false;
  std::uint64_t messages = 0;  // request + reply transmissions tagged with this discovery
};

/// Everything the reported metrics are computed from; a pure function of the
/// trace records.
struct MetricLedger {
  std::array<std::uint64_t, kMsgKindCount> tx_count{};
  std::array<std::uint64_t, kMsgKindCount> tx_bytes{};
  std::uint32_t node_count = 0;
  std::uint32_t deaths = 0;
  double first_death = kNoValue;
  double end_time = 0.0;
  std::vector<DiscoveryRecord> discoveries;
  std::uint64_t data_generated = 0;
  std::uint64_t data_delivered = 0;
  double delay_sum = 0.0;
  std::uint64_t anomalies = 0;

  std::uint64_t count(MsgKind k) const { return tx_count[static_cast<std::size_t>(k)]; }
  bool operator==(const MetricLedger& o) const;
};

MetricLedger build_ledger(const std::vector<TraceRecord>& trace);

/// All control transmissions, periodic HELLOs and zoom-outs included.
std::uint64_t control_overhead(const MetricLedger& l);
std::uint64_t control_overhead(const std::vector<TraceRecord>& trace);
/// Control transmissions other than HELLO and zoom-out.
std::uint64_t discovery_overhead(const MetricLedger& l);
std::uint64_t control_bytes(const MetricLedger& l);

/// Time of the first node death, or the end of the run if nobody died.
double network_lifetime(const MetricLedger& l);
double network_lifetime(const std::vector<TraceRecord>& trace);

/// Discovery messages over summed discovery durations (messages per second),
/// successful discoveries only. Absent when there were none.
std::optional<double> search_success_rate(const MetricLedger& l);
std::optional<double> search_success_rate(const std::vector<TraceRecord>& trace);

std::uint64_t discovery_successes(const MetricLedger& l);
std::uint64_t discovery_failures(const MetricLedger& l);
std::optional<double> mean_discovery_latency(const MetricLedger& l);
std::optional<double> mean_discovery_messages(const MetricLedger& l);
std::optional<double> delivery_ratio(const MetricLedger& l);

/// Named metric values in the fixed reporting order. Absent values are nullopt.
using MetricRow = std::vector<std::pair<std::string, std::optional<double>>>;
MetricRow metric_row(const MetricLedger& l);
std::vector<std::string> metric_names();

}  // namespace rlpr
