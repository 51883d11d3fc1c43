#include "rlpr/trace.hpp"

#include <zlib.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <json.hpp>

namespace rlpr {

namespace {

constexpr std::array<std::string_view, kTraceEventCount> kEventNames = {
    "init",     "tx",         "rx",          "drop",    "death",
    "disc_start", "disc_end", "generate",    "deliver", "timer",
    "mobility", "cont_sched", "cont_cancel", "anomaly", "end",
};

bool same_number(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

struct GzCloser {
  void operator()(gzFile f) const {
    if (f) gzclose(f);
  }
};

}  // namespace

std::string_view to_string(TraceEvent ev) { return kEventNames[static_cast<std::size_t>(ev)]; }

std::optional<TraceEvent> trace_event_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kEventNames.size(); ++i) {
    if (kEventNames[i] == s) return static_cast<TraceEvent>(i);
  }
  return std::nullopt;
}

bool is_summary_event(TraceEvent ev) {
  switch (ev) {
    case TraceEvent::Init:
    case TraceEvent::Tx:
    case TraceEvent::Death:
    case TraceEvent::DiscStart:
    case TraceEvent::DiscEnd:
    case TraceEvent::Generate:
    case TraceEvent::Deliver:
    case TraceEvent::Anomaly:
    case TraceEvent::End:
      return true;
    default:
      return false;
  }
}

bool TraceRecord::operator==(const TraceRecord& o) const {
  return t == o.t && node == o.node && ev == o.ev && msg == o.msg && bytes == o.bytes &&
         peer == o.peer && src == o.src && bid == o.bid && same_number(energy, o.energy) &&
         same_number(cost, o.cost) && same_number(value, o.value) && reason == o.reason &&
         detail == o.detail;
}

std::string to_ndjson_line(const TraceRecord& r) {
  nlohmann::ordered_json j;
  j["t"] = r.t;
  if (r.node != kNoNode) j["node"] = r.node;
  j["ev"] = to_string(r.ev);
  if (r.msg) j["msg"] = to_string(*r.msg);
  if (r.bytes != 0) j["bytes"] = r.bytes;
  if (r.peer != kNoNode) j["peer"] = r.peer;
  if (r.src != kNoNode) j["src"] = r.src;
  if (r.bid) j["bid"] = *r.bid;
  if (!std::isnan(r.energy)) j["energy"] = r.energy;
  if (!std::isnan(r.cost)) j["cost"] = r.cost;
  if (!std::isnan(r.value)) j["value"] = r.value;
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j.dump();
}

TraceRecord from_ndjson_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw TraceError(std::string("trace: malformed line: ") + e.what());
  }
  TraceRecord r;
  try {
    r.t = j.at("t").get<double>();
    const auto ev = trace_event_from_string(j.at("ev").get<std::string>());
    if (!ev) throw TraceError("trace: unknown event " + j.at("ev").get<std::string>());
    r.ev = *ev;
    if (j.contains("node")) r.node = j["node"].get<NodeId>();
    if (j.contains("msg")) {
      r.msg = msg_kind_from_string(j["msg"].get<std::string>());
      if (!r.msg) throw TraceError("trace: unknown message kind");
    }
    if (j.contains("bytes")) r.bytes = j["bytes"].get<std::uint32_t>();
    if (j.contains("peer")) r.peer = j["peer"].get<NodeId>();
    if (j.contains("src")) r.src = j["src"].get<NodeId>();
    if (j.contains("bid")) r.bid = j["bid"].get<BroadcastId>();
    if (j.contains("energy")) r.energy = j["energy"].get<double>();
    if (j.contains("cost")) r.cost = j["cost"].get<double>();
    if (j.contains("value")) r.value = j["value"].get<double>();
    if (j.contains("reason")) r.reason = j["reason"].get<std::string>();
    if (j.contains("detail")) r.detail = j["detail"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TraceError(std::string("trace: bad field: ") + e.what());
  }
  return r;
}

void write_trace(const std::filesystem::path& path, const std::vector<TraceRecord>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (path.extension() == ".gz") {
    // Fixed header fields (no name, no mtime) keep compressed output reproducible.
    std::unique_ptr<gzFile_s, GzCloser> f(gzopen(path.c_str(), "wb6"));
    if (!f) throw TraceError("trace: cannot open " + path.string());
    for (const auto& r : records) {
      std::string line = to_ndjson_line(r);
      line.push_back('\n');
      if (gzwrite(f.get(), line.data(), static_cast<unsigned>(line.size())) == 0) {
        throw TraceError("trace: write failed for " + path.string());
      }
    }
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TraceError("trace: cannot open " + path.string());
  for (const auto& r : records) out << to_ndjson_line(r) << '\n';
  if (!out) throw TraceError("trace: write failed for " + path.string());
}

std::vector<TraceRecord> read_trace(const std::filesystem::path& path) {
  // gzread passes uncompressed files through unchanged.
  std::unique_ptr<gzFile_s, GzCloser> f(gzopen(path.c_str(), "rb"));
  if (!f) throw TraceError("trace: cannot open " + path.string());
  std::vector<TraceRecord> out;
  std::string pending;
  std::array<char, 1 << 16> buf{};
  for (;;) {
    const int n = gzread(f.get(), buf.data(), static_cast<unsigned>(buf.size()));
    if (n < 0) throw TraceError("trace: read failed for " + path.string());
    if (n == 0) break;
    pending.append(buf.data(), static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (auto nl = pending.find('\n'); nl != std::string::npos; nl = pending.find('\n', start)) {
      if (nl > start) out.push_back(from_ndjson_line(std::string_view(pending).substr(start, nl - start)));
      start = nl + 1;
    }
    pending.erase(0, start);
  }
  if (!pending.empty()) out.push_back(from_ndjson_line(pending));
  return out;
}

}  // namespace rlpr
