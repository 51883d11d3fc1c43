#include "rlpr/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "rlpr/engine.hpp"

namespace rlpr {

RunOutcome execute_run(const RunSpec& spec) {
  RunOutcome out;
  out.spec = spec;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Simulation sim(spec.cfg, spec.seed);
    sim.run();
    auto trace = sim.take_trace();
    if (!spec.trace_path.empty()) write_trace(spec.trace_path, trace);
    out.ledger = build_ledger(trace);
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<RunOutcome> run_batch(const std::vector<RunSpec>& specs, unsigned workers,
                                  const ProgressFn& progress) {
  std::vector<RunOutcome> results(specs.size());
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      RunOutcome o = execute_run(specs[i]);
      std::lock_guard lock(mu);
      results[i] = std::move(o);
      ++done;
      if (progress) progress(results[i], done, specs.size());
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(specs.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return results;
}

Recipe recipe_from_key_values(const KeyValues& kv, const std::string& default_name) {
  Recipe r;
  r.name = default_name;
  r.protocols = {ProtocolKind::Rlpr, ProtocolKind::RarpLite, ProtocolKind::Aodv};
  KeyValues scenario;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else if (c != ' ' && c != '\t') {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  };
  for (const auto& [k, v] : kv) {
    if (k.rfind("recipe.", 0) != 0) {
      scenario.emplace_back(k, v);
      continue;
    }
    const std::string key = k.substr(7);
    if (key == "name") {
      r.name = v;
    } else if (key == "title") {
      r.title = v;
    } else if (key == "axis") {
      r.axis = v;
    } else if (key == "values") {
      r.values = split(v);
    } else if (key == "protocols") {
      r.protocols.clear();
      for (const auto& p : split(v)) {
        auto kind = protocol_from_string(p);
        if (!kind) throw ConfigError("recipe.protocols: unknown protocol '" + p + "'");
        r.protocols.push_back(*kind);
      }
    } else if (key == "metrics") {
      r.figure_metrics = split(v);
    } else {
      throw ConfigError("unknown recipe key '" + k + "'");
    }
  }
  apply_key_values(r.base, scenario);
  if (r.axis.empty()) throw ConfigError("recipe.axis is required");
  if (r.values.empty()) throw ConfigError("recipe.values is required");
  if (r.protocols.empty()) throw ConfigError("recipe.protocols is empty");
  const auto keys = config_keys();
  if (std::find(keys.begin(), keys.end(), r.axis) == keys.end()) {
    throw ConfigError("recipe.axis: unknown config key '" + r.axis + "'");
  }
  // Every point must be a valid scenario on its own.
  for (const auto& v : r.values) {
    ScenarioConfig probe = r.base;
    apply_key_values(probe, {{r.axis, v}});
    validate(probe);
  }
  return r;
}

Recipe load_recipe(const std::filesystem::path& file) {
  return recipe_from_key_values(parse_key_values(file), file.stem().string());
}

std::string trace_file_name(ProtocolKind p, const std::string& axis, const std::string& value,
                            std::uint64_t seed) {
  return std::string(to_string(p)) + "__" + axis + "=" + value + "__seed" +
         std::to_string(seed) + ".ndjson.gz";
}

std::optional<TraceName> parse_trace_file_name(const std::string& name) {
  const std::string suffix = ".ndjson.gz";
  if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) {
    return std::nullopt;
  }
  const std::string stem = name.substr(0, name.size() - suffix.size());
  const auto a = stem.find("__");
  const auto b = stem.rfind("__seed");
  if (a == std::string::npos || b == std::string::npos || b <= a) return std::nullopt;
  const std::string middle = stem.substr(a + 2, b - a - 2);
  const auto eq = middle.find('=');
  if (eq == std::string::npos) return std::nullopt;
  TraceName t;
  t.protocol = stem.substr(0, a);
  t.axis = middle.substr(0, eq);
  try {
    t.x = std::stod(middle.substr(eq + 1));
    t.seed = std::stoull(stem.substr(b + 6));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return t;
}

std::vector<RunSpec> expand_recipe(const Recipe& r, const std::filesystem::path& trace_dir) {
  std::vector<RunSpec> specs;
  for (const auto& v : r.values) {
    for (auto p : r.protocols) {
      for (auto seed : r.base.seeds) {
        RunSpec s;
        s.cfg = r.base;
        apply_key_values(s.cfg, {{r.axis, v}});
        s.cfg.protocol = p;
        s.seed = seed;
        s.x = std::stod(v);
        if (!trace_dir.empty()) s.trace_path = trace_dir / trace_file_name(p, r.axis, v, seed);
        specs.push_back(std::move(s));
      }
    }
  }
  return specs;
}

RunPoint to_run_point(const RunOutcome& o) {
  RunPoint p;
  p.protocol = std::string(to_string(o.spec.cfg.protocol));
  p.x = o.spec.x;
  p.seed = o.spec.seed;
  p.metrics = metric_row(o.ledger);
  return p;
}

SweepResult run_sweep(const Recipe& r, const std::filesystem::path& out_dir, unsigned workers,
                      const ProgressFn& progress) {
  const auto dir = out_dir / r.name;
  SweepResult res;
  res.outcomes = run_batch(expand_recipe(r, dir / "traces"), workers, progress);
  std::vector<RunPoint> points;
  for (const auto& o : res.outcomes) {
    if (!o.ok) {
      res.all_ok = false;
      continue;
    }
    points.push_back(to_run_point(o));
  }
  std::sort(points.begin(), points.end(), [](const RunPoint& a, const RunPoint& b) {
    return std::tie(a.x, a.protocol, a.seed) < std::tie(b.x, b.protocol, b.seed);
  });
  write_runs_table(dir / "runs.tsv", r.axis, points);
  res.rows = aggregate(points);
  res.warnings = emit_report(dir, r.axis, res.rows);
  return res;
}

SweepResult report_from_traces(const std::filesystem::path& dir) {
  const auto trace_dir = dir / "traces";
  if (!std::filesystem::is_directory(trace_dir)) {
    throw ReportError("no traces directory under " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(trace_dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  SweepResult res;
  std::vector<RunPoint> points;
  std::string axis;
  for (const auto& f : files) {
    const auto name = parse_trace_file_name(f.filename().string());
    if (!name) continue;
    if (axis.empty()) axis = name->axis;
    if (name->axis != axis) throw ReportError("traces mix sweep axes " + axis + " and " + name->axis);
    RunPoint p;
    p.protocol = name->protocol;
    p.x = name->x;
    p.seed = name->seed;
    p.metrics = metric_row(build_ledger(read_trace(f)));
    points.push_back(std::move(p));
  }
  if (points.empty()) throw ReportError("no trace files under " + trace_dir.string());
  std::sort(points.begin(), points.end(), [](const RunPoint& a, const RunPoint& b) {
    return std::tie(a.x, a.protocol, a.seed) < std::tie(b.x, b.protocol, b.seed);
  });
  write_runs_table(dir / "runs.tsv", axis, points);
  res.rows = aggregate(points);
  res.warnings = emit_report(dir, axis, res.rows);
  return res;
}

}  // namespace rlpr
