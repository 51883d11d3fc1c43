#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlpr/metrics.hpp"

namespace rlpr {

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::optional<double> ci_half;  // Student-t half width; needs n >= 2
};

/// Mean, range and two-sided Student-t confidence half width (n - 1 dof).
Summary summarize(const std::vector<double>& values, double confidence = 0.95);

struct ReportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Metrics of one finished run at one sweep point.
struct RunPoint {
  std::string protocol;
  double x = 0.0;
  std::uint64_t seed = 0;
  MetricRow metrics;
};

struct AggregateRow {
  std::string protocol;
  double x = 0.0;
  std::string metric;
  Summary summary;
  std::size_t absent = 0;  // runs where the metric was undefined
};

/// Groups runs by (metric, protocol, x). Throws ReportError when protocols
/// were not run at the same set of sweep values.
std::vector<AggregateRow> aggregate(const std::vector<RunPoint>& runs);

/// Writes tables/<metric>.tsv and series/<metric>.tsv under `dir`. Returns
/// warnings (e.g. confidence intervals omitted for single-seed points).
std::vector<std::string> emit_report(const std::filesystem::path& dir, const std::string& axis,
                                     const std::vector<AggregateRow>& rows);

/// Per-run metric values, one row per run.
void write_runs_table(const std::filesystem::path& file, const std::string& axis,
                      const std::vector<RunPoint>& runs);

}  // namespace rlpr
