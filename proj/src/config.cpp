#include "rlpr/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace rlpr {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto at = s.find(sep, start);
    const auto piece = trim(s.substr(start, at == std::string_view::npos ? s.npos : at - start));
    if (!piece.empty()) out.push_back(piece);
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  throw ConfigError("config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    bad_value(key, v, "a number");
  }
  if (used != v.size() || !std::isfinite(out)) bad_value(key, v, "a finite number");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad_value(key, v, "a non-negative integer");
  return out;
}

std::uint32_t to_u32(const std::string& key, const std::string& v) {
  const auto x = to_u64(key, v);
  if (x > 0xffffffffull) bad_value(key, v, "a 32-bit integer");
  return static_cast<std::uint32_t>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "true/false");
}

Position to_position(const std::string& key, const std::string& v) {
  const auto parts = split(v, ':');
  if (parts.size() != 2) bad_value(key, v, "x:y");
  return {to_double(key, parts[0]), to_double(key, parts[1])};
}

using Setter = std::function<void(ScenarioConfig&, const std::string& key, const std::string&)>;

template <class T>
Setter number(T ScenarioConfig::*field) {
  return [field](ScenarioConfig& c, const std::string& k, const std::string& v) {
    if constexpr (std::is_same_v<T, double>) {
      c.*field = to_double(k, v);
    } else {
      c.*field = to_u32(k, v);
    }
  };
}

Setter flag(bool ScenarioConfig::*field) {
  return [field](ScenarioConfig& c, const std::string& k, const std::string& v) {
    c.*field = to_bool(k, v);
  };
}

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"protocol",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         auto p = protocol_from_string(v);
         if (!p) bad_value(k, v, "rlpr|aodv|rarp_lite");
         c.protocol = *p;
       }},
      {"node_count", number(&ScenarioConfig::node_count)},
      {"source_count", number(&ScenarioConfig::source_count)},
      {"destination", number(&ScenarioConfig::destination)},
      {"sources",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.sources.clear();
         for (const auto& s : split(v, ',')) c.sources.push_back(to_u32(k, s));
         c.source_count = static_cast<std::uint32_t>(c.sources.size());
       }},
      {"area_width", number(&ScenarioConfig::area_width)},
      {"area_height", number(&ScenarioConfig::area_height)},
      {"altitude", number(&ScenarioConfig::altitude)},
      {"speed_min_kmh", number(&ScenarioConfig::speed_min_kmh)},
      {"speed_max_kmh", number(&ScenarioConfig::speed_max_kmh)},
      {"pause_time", number(&ScenarioConfig::pause_time)},
      {"sim_duration", number(&ScenarioConfig::sim_duration)},
      {"seeds",
       [](ScenarioConfig& c, const std::string&, const std::string& v) {
         c.seeds = parse_seed_list(v);
       }},
      {"dest_position",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.dest_position = to_position(k, v);
       }},
      {"dest_unlimited_energy", flag(&ScenarioConfig::dest_unlimited_energy)},
      {"energy_min", number(&ScenarioConfig::energy_min)},
      {"energy_max", number(&ScenarioConfig::energy_max)},
      {"tx_cost_per_bit", number(&ScenarioConfig::tx_cost_per_bit)},
      {"rx_cost_per_bit", number(&ScenarioConfig::rx_cost_per_bit)},
      {"idle_drain", number(&ScenarioConfig::idle_drain)},
      {"energy_threshold", number(&ScenarioConfig::energy_threshold)},
      {"carrier_freq", number(&ScenarioConfig::carrier_freq)},
      {"max_range", number(&ScenarioConfig::max_range)},
      {"rssi_threshold", number(&ScenarioConfig::rssi_threshold)},
      {"rlrq_rssi_threshold", number(&ScenarioConfig::rlrq_rssi_threshold)},
      {"data_rate", number(&ScenarioConfig::data_rate)},
      {"slot_time", number(&ScenarioConfig::slot_time)},
      {"cw", number(&ScenarioConfig::cw)},
      {"mac_overhead_bytes", number(&ScenarioConfig::mac_overhead_bytes)},
      {"mac_retry_limit", number(&ScenarioConfig::mac_retry_limit)},
      {"preamble", number(&ScenarioConfig::preamble)},
      {"hello_interval", number(&ScenarioConfig::hello_interval)},
      {"staleness_factor", number(&ScenarioConfig::staleness_factor)},
      {"zone_half_angle", number(&ScenarioConfig::zone_half_angle)},
      {"alpha", number(&ScenarioConfig::alpha)},
      {"beta", number(&ScenarioConfig::beta)},
      {"contention_slot", number(&ScenarioConfig::contention_slot)},
      {"contention_jitter", number(&ScenarioConfig::contention_jitter)},
      {"dup_cache_size", number(&ScenarioConfig::dup_cache_size)},
      {"flood_jitter", number(&ScenarioConfig::flood_jitter)},
      {"route_timeout", number(&ScenarioConfig::route_timeout)},
      {"discovery_timeout", number(&ScenarioConfig::discovery_timeout)},
      {"discovery_retries", number(&ScenarioConfig::discovery_retries)},
      {"discovery_holddown", number(&ScenarioConfig::discovery_holddown)},
      {"rarp_window", number(&ScenarioConfig::rarp_window)},
      {"rarp_ect_cap", number(&ScenarioConfig::rarp_ect_cap)},
      {"rarp_hop_penalty", number(&ScenarioConfig::rarp_hop_penalty)},
      {"rarp_energy_weight", number(&ScenarioConfig::rarp_energy_weight)},
      {"rarp_risk_delay", number(&ScenarioConfig::rarp_risk_delay)},
      {"cbr_interval", number(&ScenarioConfig::cbr_interval)},
      {"packet_size", number(&ScenarioConfig::packet_size)},
      {"traffic_start", number(&ScenarioConfig::traffic_start)},
      {"queue_length", number(&ScenarioConfig::queue_length)},
      {"cbr_count", number(&ScenarioConfig::cbr_count)},
      {"positions",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.positions.clear();
         for (const auto& s : split(v, ',')) c.positions.push_back(to_position(k, s));
       }},
      {"static_nodes", flag(&ScenarioConfig::static_nodes)},
      {"energies",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.energies.clear();
         for (const auto& s : split(v, ',')) c.energies.push_back(to_double(k, s));
       }},
      {"trace_level",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         if (v == "summary") {
           c.trace_level = TraceLevel::Summary;
         } else if (v == "full") {
           c.trace_level = TraceLevel::Full;
         } else {
           bad_value(k, v, "summary|full");
         }
       }},
  };
  return table;
}

void parse_into(KeyValues& out, std::string_view text, const std::filesystem::path& base_dir,
                int depth) {
  if (depth > 16) throw ConfigError("config include depth exceeded (cycle?)");
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (key == "include") {
      const auto path = base_dir / value;
      std::ifstream f(path);
      if (!f) throw ConfigError("config include not found: " + path.string());
      std::stringstream buf;
      buf << f.rdbuf();
      parse_into(out, buf.str(), path.parent_path(), depth + 1);
      continue;
    }
    out.emplace_back(std::move(key), std::move(value));
  }
}

}  // namespace

std::string_view to_string(ProtocolKind p) {
  switch (p) {
    case ProtocolKind::Rlpr:
      return "rlpr";
    case ProtocolKind::Aodv:
      return "aodv";
    case ProtocolKind::RarpLite:
      return "rarp_lite";
  }
  return "?";
}

std::optional<ProtocolKind> protocol_from_string(std::string_view s) {
  if (s == "rlpr") return ProtocolKind::Rlpr;
  if (s == "aodv") return ProtocolKind::Aodv;
  if (s == "rarp_lite" || s == "rarp-lite") return ProtocolKind::RarpLite;
  return std::nullopt;
}

MobilityConfig ScenarioConfig::mobility() const {
  return {area_width, area_height, kmh_to_mps(speed_min_kmh), kmh_to_mps(speed_max_kmh),
          pause_time};
}

RadioModel ScenarioConfig::radio() const {
  return RadioModel::calibrated(carrier_freq, max_range, rssi_threshold);
}

ZoneConfig ScenarioConfig::zone() const { return {zone_half_angle, energy_threshold}; }

ContentionConfig ScenarioConfig::contention() const {
  return {contention_slot, contention_jitter};
}

Position ScenarioConfig::destination_position() const {
  if (!positions.empty() && destination < positions.size()) return positions[destination];
  return dest_position.value_or(Position{area_width / 2.0, area_height / 2.0});
}

std::vector<NodeId> ScenarioConfig::source_ids() const {
  if (!sources.empty()) return sources;
  std::vector<NodeId> out;
  for (NodeId id = 0; out.size() < source_count && id < node_count; ++id) {
    if (id != destination) out.push_back(id);
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view s) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(s, ',')) {
    if (auto dots = part.find(".."); dots != std::string::npos) {
      const auto lo = to_u64("seeds", trim(part.substr(0, dots)));
      const auto hi = to_u64("seeds", trim(part.substr(dots + 2)));
      if (hi < lo) bad_value("seeds", part, "an increasing range a..b");
      for (auto x = lo; x <= hi; ++x) out.push_back(x);
    } else {
      out.push_back(to_u64("seeds", part));
    }
  }
  if (out.empty()) bad_value("seeds", std::string(s), "at least one seed");
  return out;
}

KeyValues parse_key_values_text(std::string_view text, const std::filesystem::path& base_dir) {
  KeyValues out;
  parse_into(out, text, base_dir, 0);
  return out;
}

KeyValues parse_key_values(const std::filesystem::path& file) {
  std::ifstream f(file);
  if (!f) throw ConfigError("cannot open config file: " + file.string());
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_key_values_text(buf.str(), file.parent_path());
}

void apply_key_values(ScenarioConfig& cfg, const KeyValues& kv) {
  const auto& table = setters();
  for (const auto& [key, value] : kv) {
    auto it = std::find_if(table.begin(), table.end(),
                           [&](const auto& entry) { return entry.first == key; });
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(cfg, key, value);
  }
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

void validate(const ScenarioConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(c.node_count >= 2, "node_count must be at least 2");
  require(c.source_count < c.node_count, "source_count must be less than node_count");
  require(c.destination < c.node_count, "destination must be a node id below node_count");
  for (NodeId s : c.source_ids()) {
    require(s < c.node_count, "source id out of range");
    require(s != c.destination, "a source cannot be the destination");
  }
  require(c.area_width > 0 && c.area_height > 0, "area dimensions must be positive");
  require(c.speed_min_kmh > 0 && c.speed_max_kmh >= c.speed_min_kmh,
          "speed range must satisfy 0 < speed_min_kmh <= speed_max_kmh");
  require(c.pause_time >= 0, "pause_time must be non-negative");
  require(c.sim_duration > 0, "sim_duration must be positive");
  require(!c.seeds.empty(), "at least one seed is required");
  if (c.dest_position) {
    require(c.dest_position->x >= 0 && c.dest_position->x <= c.area_width &&
                c.dest_position->y >= 0 && c.dest_position->y <= c.area_height,
            "dest_position must lie inside the area");
  }
  require(c.energy_min >= 0 && c.energy_max >= c.energy_min,
          "energy range must satisfy 0 <= energy_min <= energy_max");
  require(c.tx_cost_per_bit >= 0 && c.rx_cost_per_bit >= 0 && c.idle_drain >= 0,
          "energy costs must be non-negative");
  require(c.energy_threshold >= 0, "energy_threshold must be non-negative");
  require(c.carrier_freq > 0, "carrier_freq must be positive");
  require(c.max_range > 0, "max_range must be positive");
  require(c.data_rate > 0, "data_rate must be positive");
  require(c.slot_time > 0, "slot_time must be positive");
  require(c.cw >= 1, "cw must be at least 1");
  require(c.mac_retry_limit <= 10, "mac_retry_limit must be at most 10");
  require(c.preamble >= 0, "preamble must be non-negative");
  require(c.hello_interval > 0, "hello_interval must be positive");
  require(c.staleness_factor >= 1, "staleness_factor must be at least 1");
  require(c.zone_half_angle > 0 && c.zone_half_angle <= 180,
          "zone_half_angle must be in (0, 180]");
  require(c.alpha >= 0 && c.beta >= 0, "alpha and beta must be non-negative");
  require(c.contention_slot > 0 && c.contention_jitter > 0,
          "contention_slot and contention_jitter must be positive");
  require(c.contention_jitter * (c.node_count + 1) < c.contention_slot,
          "contention_jitter * (node_count + 1) must stay below contention_slot");
  require(c.dup_cache_size >= 1, "dup_cache_size must be at least 1");
  require(c.flood_jitter >= 0, "flood_jitter must be non-negative");
  require(c.route_timeout > 0, "route_timeout must be positive");
  require(c.discovery_timeout > 0, "discovery_timeout must be positive");
  require(c.discovery_holddown >= 0, "discovery_holddown must be non-negative");
  require(c.rarp_window > 0, "rarp_window must be positive");
  require(c.rarp_ect_cap > 0, "rarp_ect_cap must be positive");
  require(c.rarp_hop_penalty >= 0, "rarp_hop_penalty must be non-negative");
  require(c.rarp_energy_weight >= 0, "rarp_energy_weight must be non-negative");
  require(c.rarp_risk_delay >= 0, "rarp_risk_delay must be non-negative");
  require(c.cbr_interval > 0, "cbr_interval must be positive");
  require(c.packet_size >= 1 && c.packet_size <= 65535, "packet_size must be in [1, 65535]");
  require(c.traffic_start >= 0, "traffic_start must be non-negative");
  require(c.queue_length >= 1, "queue_length must be at least 1");
  if (!c.positions.empty()) {
    require(c.positions.size() == c.node_count, "positions must list every node");
    for (const auto& p : c.positions) {
      require(p.x >= 0 && p.x <= c.area_width && p.y >= 0 && p.y <= c.area_height,
              "scripted position outside the area");
    }
  }
  if (!c.energies.empty()) {
    require(c.energies.size() == c.node_count, "energies must list every node");
    for (double e : c.energies) require(e >= 0, "scripted energies must be non-negative");
  }
}

ScenarioConfig load_from_text(std::string_view text) {
  ScenarioConfig cfg;
  apply_key_values(cfg, parse_key_values_text(text));
  validate(cfg);
  return cfg;
}

ScenarioConfig validate_and_load(const std::filesystem::path& file) {
  ScenarioConfig cfg;
  apply_key_values(cfg, parse_key_values(file));
  validate(cfg);
  return cfg;
}

}  // namespace rlpr
