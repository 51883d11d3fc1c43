#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rlpr/config.hpp"
#include "rlpr/metrics.hpp"
#include "rlpr/report.hpp"

namespace rlpr {

struct RunSpec {
  ScenarioConfig cfg;
  std::uint64_t seed = 1;
  double x = 0.0;                     // sweep coordinate, 0 for single runs
  std::filesystem::path trace_path;   // empty: keep the trace in memory only
};

struct RunOutcome {
  RunSpec spec;
  bool ok = false;
  std::string error;
  MetricLedger ledger;
  double wall_seconds = 0.0;
};

/// Runs one simulation, persists its trace when requested, builds its ledger.
/// Engine failures are captured in the outcome instead of thrown.
RunOutcome execute_run(const RunSpec& spec);

using ProgressFn = std::function<void(const RunOutcome&, std::size_t done, std::size_t total)>;

/// Executes every spec on up to `workers` threads. Output order matches input.
std::vector<RunOutcome> run_batch(const std::vector<RunSpec>& specs, unsigned workers,
                                  const ProgressFn& progress = {});

/// A sweep: base config, one axis (a numeric config key) and its values,
/// the protocols to compare, and the seeds.
struct Recipe {
  std::string name;
  std::string title;
  std::string axis;
  std::vector<std::string> values;
  std::vector<ProtocolKind> protocols;
  std::vector<std::string> figure_metrics;
  ScenarioConfig base;
};

/// Keys prefixed `recipe.` describe the sweep; everything else configures the
/// scenario. `recipe.name` defaults to the file stem.
Recipe load_recipe(const std::filesystem::path& file);
Recipe recipe_from_key_values(const KeyValues& kv, const std::string& default_name);

/// Trace file name for one run: <protocol>__<axis>=<value>__seed<seed>.ndjson.gz
std::string trace_file_name(ProtocolKind p, const std::string& axis, const std::string& value,
                            std::uint64_t seed);

struct TraceName {
  std::string protocol;
  std::string axis;
  double x = 0.0;
  std::uint64_t seed = 0;
};
std::optional<TraceName> parse_trace_file_name(const std::string& name);

/// Expands a recipe into run specs (values x protocols x seeds).
std::vector<RunSpec> expand_recipe(const Recipe& r, const std::filesystem::path& trace_dir);

struct SweepResult {
  std::vector<RunOutcome> outcomes;
  std::vector<AggregateRow> rows;
  std::vector<std::string> warnings;
  bool all_ok = true;
};

/// Runs the recipe and writes traces/, runs.tsv, tables/ and series/ under
/// out_dir/<recipe name>.
SweepResult run_sweep(const Recipe& r, const std::filesystem::path& out_dir, unsigned workers,
                      const ProgressFn& progress = {});

/// Rebuilds tables from the traces under dir/traces.
SweepResult report_from_traces(const std::filesystem::path& dir);

RunPoint to_run_point(const RunOutcome& o);

}  // namespace rlpr
