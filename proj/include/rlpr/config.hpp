#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rlpr/geometry.hpp"
#include "rlpr/mobility.hpp"
#include "rlpr/radio.hpp"
#include "rlpr/routing_metrics.hpp"

namespace rlpr {

enum class ProtocolKind { Rlpr, Aodv, RarpLite };

std::string_view to_string(ProtocolKind p);
std::optional<ProtocolKind> protocol_from_string(std::string_view s);

enum class TraceLevel { Summary, Full };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every tunable of one simulated scenario. Defaults reproduce the published
/// simulation table where it gives a value; the rest are documented in README.
struct ScenarioConfig {
  ProtocolKind protocol = ProtocolKind::Rlpr;
  std::uint32_t node_count = 20;
  std::uint32_t source_count = 1;
  NodeId destination = 0;
  std::vector<NodeId> sources;  // empty: nodes 1..source_count

  double area_width = 1000.0;
  double area_height = 1000.0;
  double altitude = 100.0;
  double speed_min_kmh = 10.0;
  double speed_max_kmh = 25.0;
  double pause_time = 0.0;
  double sim_duration = 900.0;
  std::vector<std::uint64_t> seeds = {1};

  std::optional<Position> dest_position;  // default: area centre
  bool dest_unlimited_energy = true;

  double energy_min = 10.0;
  double energy_max = 100.0;
  double tx_cost_per_bit = 50e-6;
  double rx_cost_per_bit = 5e-6;
  double idle_drain = 0.0;
  double energy_threshold = 10.0;

  double carrier_freq = 2.4e9;
  double max_range = 250.0;
  double rssi_threshold = -64.0;
  double rlrq_rssi_threshold = -64.0;

  double data_rate = 2e6;
  double slot_time = 20e-6;
  std::uint32_t cw = 15;
  std::uint32_t mac_overhead_bytes = 28;
  std::uint32_t mac_retry_limit = 3;  // unicast retransmissions after a missed ack
  double preamble = 192e-6;

  double hello_interval = 1.0;
  double staleness_factor = 2.5;
  double zone_half_angle = 90.0;
  double alpha = 0.5;
  double beta = 0.5;
  double contention_slot = 0.010;
  double contention_jitter = 5e-6;
  std::uint32_t dup_cache_size = 256;
  double flood_jitter = 0.010;
  double route_timeout = 10.0;
  double discovery_timeout = 1.0;
  std::uint32_t discovery_retries = 2;
  double discovery_holddown = 10.0;
  double rarp_window = 0.050;
  double rarp_ect_cap = 60.0;
  double rarp_hop_penalty = 0.05;
  double rarp_risk_delay = 8.0;  // extra relay jitter, in flood_jitter units, at zero energy
  double rarp_energy_weight = 1.0;  // per energy_max of weakest relay residual

  double cbr_interval = 1.0;
  std::uint32_t packet_size = 512;
  double traffic_start = 10.0;
  std::uint32_t queue_length = 10;
  std::uint32_t cbr_count = 0;  // 0: unlimited

  std::vector<Position> positions;  // scripted placement (all nodes)
  bool static_nodes = false;
  std::vector<double> energies;     // scripted initial energies (all nodes)

  TraceLevel trace_level = TraceLevel::Summary;

  // Derived views.
  MobilityConfig mobility() const;
  RadioModel radio() const;
  ZoneConfig zone() const;
  ContentionConfig contention() const;
  Position destination_position() const;
  std::vector<NodeId> source_ids() const;
  double v_max() const { return kmh_to_mps(speed_max_kmh); }
  double staleness_horizon() const { return staleness_factor * hello_interval; }
};

/// Raw `key = value` pairs after includes are resolved, in file order.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses the flat key/value format. `#` starts a comment; `include = path`
/// splices another file (relative to the including file) in place.
KeyValues parse_key_values(const std::filesystem::path& file);
KeyValues parse_key_values_text(std::string_view text,
                                const std::filesystem::path& base_dir = {});

/// Applies pairs on top of `cfg`. Unknown keys and malformed values throw
/// ConfigError naming the key.
void apply_key_values(ScenarioConfig& cfg, const KeyValues& kv);

/// Throws ConfigError describing the first violated constraint.
void validate(const ScenarioConfig& cfg);

ScenarioConfig validate_and_load(const std::filesystem::path& file);
ScenarioConfig load_from_text(std::string_view text);

/// Every known key, in documentation order.
std::vector<std::string> config_keys();

/// Parses "1,2,3" or "1..30" (or a mix) into a seed list.
std::vector<std::uint64_t> parse_seed_list(std::string_view s);

}  // namespace rlpr
