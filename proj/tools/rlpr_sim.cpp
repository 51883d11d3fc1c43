// Command-line front end: run, sweep, report, validate.

#include <CLI11.hpp>

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include "rlpr/config.hpp"
#include "rlpr/runner.hpp"

namespace fs = std::filesystem;
using namespace rlpr;

namespace {

fs::path resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("RLPR_OUT_DIR"); env && *env) return env;
  return "out";
}

void print_row(std::ostream& os, const MetricRow& row) {
  for (const auto& [name, v] : row) {
    os << "  " << std::left << std::setw(22) << name << ' ';
    if (v) {
      os << *v;
    } else {
      os << "-";
    }
    os << '\n';
  }
}

// Compact console view of the headline metrics.
void print_summary(const std::string& axis, const std::vector<AggregateRow>& rows) {
  const std::set<std::string> headline = {"control_overhead", "network_lifetime",
                                          "search_success_rate"};
  for (const auto& metric : headline) {
    std::cout << metric << '\n';
    std::cout << "  " << std::left << std::setw(10) << "protocol" << std::setw(10) << axis
              << std::setw(14) << "mean" << "ci95\n";
    for (const auto& r : rows) {
      if (r.metric != metric) continue;
      std::cout << "  " << std::setw(10) << r.protocol << std::setw(10) << r.x << std::setw(14)
                << r.summary.mean;
      if (r.summary.ci_half) std::cout << "+-" << *r.summary.ci_half;
      std::cout << '\n';
    }
  }
}

int cmd_validate(const std::string& config, const std::string& recipe_file) {
  if (!recipe_file.empty()) {
    const auto r = load_recipe(recipe_file);
    // Every sweep point must make a valid scenario, not just the base.
    for (const auto& v : r.values) {
      auto cfg = r.base;
      apply_key_values(cfg, {{r.axis, v}});
      validate(cfg);
    }
    std::cout << "ok: " << r.name << ", " << r.axis << " x " << r.values.size() << ", "
              << r.protocols.size() << " protocol(s), " << r.base.seeds.size() << " seed(s)\n";
    return 0;
  }
  const auto cfg = validate_and_load(config);
  std::cout << "ok: " << to_string(cfg.protocol) << ", " << cfg.node_count << " nodes, "
            << cfg.source_ids().size() << " source(s), " << cfg.seeds.size() << " seed(s)\n";
  return 0;
}

int cmd_run(const std::string& config, const std::string& protocol, const std::string& seeds,
            const std::string& out_flag, unsigned workers) {
  ScenarioConfig cfg;
  if (!config.empty()) cfg = validate_and_load(config);
  if (!protocol.empty()) apply_key_values(cfg, {{"protocol", protocol}});
  if (!seeds.empty()) cfg.seeds = parse_seed_list(seeds);
  validate(cfg);
  const fs::path dir = resolve_out_dir(out_flag) / "run";
  std::vector<RunSpec> specs;
  for (auto seed : cfg.seeds) {
    RunSpec s;
    s.cfg = cfg;
    s.seed = seed;
    s.trace_path = dir / "traces" / trace_file_name(cfg.protocol, "run", "0", seed);
    specs.push_back(s);
  }
  const auto outcomes = run_batch(specs, workers);
  bool ok = true;
  std::vector<RunPoint> points;
  for (const auto& o : outcomes) {
    std::cout << to_string(o.spec.cfg.protocol) << " seed " << o.spec.seed;
    if (!o.ok) {
      std::cout << ": FAILED: " << o.error << '\n';
      ok = false;
      continue;
    }
    std::cout << " (" << std::fixed << std::setprecision(2) << o.wall_seconds << " s)\n"
              << std::defaultfloat << std::setprecision(6);
    print_row(std::cout, metric_row(o.ledger));
    points.push_back(to_run_point(o));
  }
  write_runs_table(dir / "runs.tsv", "run", points);
  std::cout << "traces: " << (dir / "traces").string() << '\n';
  return ok ? 0 : 1;
}

int cmd_sweep(const std::string& recipe_path, const std::string& seeds, const std::string& protocol,
              const std::string& out_flag, unsigned workers) {
  Recipe r = load_recipe(recipe_path);
  if (!seeds.empty()) r.base.seeds = parse_seed_list(seeds);
  if (!protocol.empty()) {
    auto p = protocol_from_string(protocol);
    if (!p) throw ConfigError("unknown protocol '" + protocol + "'");
    r.protocols = {*p};
  }
  const fs::path out = resolve_out_dir(out_flag);
  std::cout << "recipe " << r.name << ": " << r.values.size() << " points x "
            << r.protocols.size() << " protocols x " << r.base.seeds.size() << " seeds\n";
  const auto res = run_sweep(r, out, workers, [](const RunOutcome& o, std::size_t done, std::size_t total) {
    std::cerr << "[" << done << "/" << total << "] " << to_string(o.spec.cfg.protocol) << " x="
              << o.spec.x << " seed=" << o.spec.seed << (o.ok ? "" : " FAILED: " + o.error) << '\n';
  });
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  print_summary(r.axis, res.rows);
  std::cout << "results: " << (out / r.name).string() << '\n';
  return res.all_ok ? 0 : 1;
}

int cmd_report(const std::string& dir) {
  const auto res = report_from_traces(dir);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  std::string axis = "x";
  print_summary(axis, res.rows);
  std::cout << "tables rewritten under " << dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packet-level FANET routing simulator (RLPR, AODV, RARP-lite)"};
  app.require_subcommand(1);

  std::string config, recipe, seeds, out_dir, protocol, report_dir;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "run one scenario for each seed");
  run->add_option("--config", config, "scenario file");
  run->add_option("--protocol", protocol, "rlpr | aodv | rarp_lite");
  run->add_option("--seeds", seeds, "seed list, e.g. 1..5 or 1,4,9");
  run->add_option("--out-dir", out_dir, "output directory (default $RLPR_OUT_DIR or ./out)");
  run->add_option("--workers", workers, "parallel runs");

  auto* sweep = app.add_subcommand("sweep", "run a recipe across its axis, protocols and seeds");
  sweep->add_option("--recipe", recipe, "recipe file")->required();
  sweep->add_option("--seeds", seeds, "override the recipe seeds");
  sweep->add_option("--protocol", protocol, "restrict to one protocol");
  sweep->add_option("--out-dir", out_dir, "output directory (default $RLPR_OUT_DIR or ./out)");
  sweep->add_option("--workers", workers, "parallel runs");

  auto* report = app.add_subcommand("report", "recompute tables from persisted traces");
  report->add_option("dir", report_dir, "sweep directory containing traces/")->required();

  auto* val = app.add_subcommand("validate", "check a scenario file");
  std::string val_recipe;
  auto* val_cfg = val->add_option("--config", config, "scenario file");
  auto* val_rec = val->add_option("--recipe", val_recipe, "sweep recipe");
  val_cfg->excludes(val_rec);
  val->require_option(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, protocol, seeds, out_dir, workers);
    if (*sweep) return cmd_sweep(recipe, seeds, protocol, out_dir, workers);
    if (*report) return cmd_report(report_dir);
    if (*val) return cmd_validate(config, val_recipe);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
