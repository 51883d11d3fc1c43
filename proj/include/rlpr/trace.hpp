#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rlpr/geometry.hpp"
#include "rlpr/messages.hpp"

namespace rlpr {

enum class TraceEvent : std::uint8_t {
  Init,        // node created: energy, value = 1 if unlimited
  Tx,          // frame put on the air: msg, bytes, peer (unicast target), energy before debit
  Rx,          // frame delivered to the protocol
  Drop,        // frame or packet lost, reason says why
  Death,       // residual energy reached zero
  DiscStart,   // source began a route discovery (src, bid, peer = destination)
  DiscEnd,     // discovery finished, value = 1 on success, 0 on failure
  Generate,    // CBR packet created at a source
  Deliver,     // data packet reached its destination, value = end-to-end delay
  Timer,       // protocol timer fired (reason = timer kind)
  Mobility,    // leg transition, detail = position
  ContSched,   // contention timer armed, value = composite metric, cost = delay
  ContCancel,  // contention timer suppressed by an overheard rebroadcast
  Anomaly,     // protocol invariant violation that was tolerated (e.g. orphan reply)
  End,         // end of run marker
};

inline constexpr std::size_t kTraceEventCount = 15;

std::string_view to_string(TraceEvent ev);
std::optional<TraceEvent> trace_event_from_string(std::string_view s);

/// Events written at summary level; everything else is full level only.
bool is_summary_event(TraceEvent ev);

inline constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

/// One line of the event trace. Unused numeric fields hold NaN and unused ids
/// hold kNoNode; both are omitted from the serialized form.
struct TraceRecord {
  double t = 0.0;
  NodeId node = kNoNode;
  TraceEvent ev = TraceEvent::Init;
  std::optional<MsgKind> msg;
  std::uint32_t bytes = 0;
  NodeId peer = kNoNode;
  NodeId src = kNoNode;
  std::optional<BroadcastId> bid;
  double energy = kNoValue;
  double cost = kNoValue;
  double value = kNoValue;
  std::string reason;
  std::string detail;

  bool operator==(const TraceRecord& o) const;
};

std::string to_ndjson_line(const TraceRecord& r);
TraceRecord from_ndjson_line(std::string_view line);

/// Writes one record per line. Paths ending in ".gz" are gzip-compressed.
void write_trace(const std::filesystem::path& path, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_trace(const std::filesystem::path& path);

struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rlpr
