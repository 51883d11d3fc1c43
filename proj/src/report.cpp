#include "rlpr/report.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace rlpr {

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::ofstream open_out(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw ReportError("cannot write " + file.string());
  return out;
}

}  // namespace

Summary summarize(const std::vector<double>& values, double confidence) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    boost::math::students_t dist(static_cast<double>(s.n - 1));
    const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
    s.ci_half = t * sd / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

std::vector<AggregateRow> aggregate(const std::vector<RunPoint>& runs) {
  std::map<std::string, std::set<double>> axis_by_protocol;
  for (const auto& r : runs) axis_by_protocol[r.protocol].insert(r.x);
  if (!axis_by_protocol.empty()) {
    const auto& ref = axis_by_protocol.begin()->second;
    for (const auto& [proto, xs] : axis_by_protocol) {
      if (xs != ref) {
        throw ReportError("sweep axes differ between protocols (" +
                          axis_by_protocol.begin()->first + " vs " + proto + ")");
      }
    }
  }

  std::vector<std::string> order;
  std::map<std::tuple<std::string, std::string, double>, std::pair<std::vector<double>, std::size_t>>
      groups;
  for (const auto& r : runs) {
    for (const auto& [name, value] : r.metrics) {
      if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
      auto& g = groups[{name, r.protocol, r.x}];
      if (value) {
        g.first.push_back(*value);
      } else {
        ++g.second;
      }
    }
  }

  std::vector<AggregateRow> rows;
  for (const auto& metric : order) {
    for (const auto& [key, g] : groups) {
      if (std::get<0>(key) != metric) continue;
      AggregateRow row;
      row.metric = metric;
      row.protocol = std::get<1>(key);
      row.x = std::get<2>(key);
      row.summary = summarize(g.first);
      row.absent = g.second;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<std::string> emit_report(const std::filesystem::path& dir, const std::string& axis,
                                     const std::vector<AggregateRow>& rows) {
  std::vector<std::string> warnings;
  std::map<std::string, std::vector<const AggregateRow*>> by_metric;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (!by_metric.count(r.metric)) order.push_back(r.metric);
    by_metric[r.metric].push_back(&r);
  }
  bool warned = false;
  for (const auto& metric : order) {
    const auto& group = by_metric[metric];
    const bool with_ci = std::all_of(group.begin(), group.end(),
                                     [](const AggregateRow* r) { return r->summary.ci_half.has_value(); });
    if (!with_ci && !warned) {
      warnings.push_back("fewer than two valid runs at some point: confidence columns omitted");
      warned = true;
    }

    auto table = open_out(dir / "tables" / (metric + ".tsv"));
    table << "protocol\t" << axis << "\tn\tabsent\tmean\tmin\tmax";
    if (with_ci) table << "\tci95_half\tci95_low\tci95_high";
    table << '\n';
    for (const auto* r : group) {
      const auto& s = r->summary;
      table << r->protocol << '\t' << fmt_num(r->x) << '\t' << s.n << '\t' << r->absent;
      if (s.n == 0) {
        table << "\t\t\t";
      } else {
        table << '\t' << fmt_num(s.mean) << '\t' << fmt_num(s.min) << '\t' << fmt_num(s.max);
      }
      if (with_ci) {
        table << '\t' << fmt_num(*s.ci_half) << '\t' << fmt_num(s.mean - *s.ci_half) << '\t'
              << fmt_num(s.mean + *s.ci_half);
      }
      table << '\n';
    }

    // One block per protocol, blocks separated by two blank lines.
    auto series = open_out(dir / "series" / (metric + ".tsv"));
    std::string current;
    for (const auto* r : group) {
      if (r->summary.n == 0) continue;
      if (r->protocol != current) {
        if (!current.empty()) series << "\n\n";
        current = r->protocol;
        series << "# " << current << '\n' << "# " << axis << "\tmean\tci95_half\n";
      }
      series << fmt_num(r->x) << '\t' << fmt_num(r->summary.mean) << '\t'
             << (r->summary.ci_half ? fmt_num(*r->summary.ci_half) : "0") << '\n';
    }
  }
  return warnings;
}

void write_runs_table(const std::filesystem::path& file, const std::string& axis,
                      const std::vector<RunPoint>& runs) {
  auto out = open_out(file);
  out << "protocol\t" << axis << "\tseed";
  if (!runs.empty()) {
    for (const auto& [name, _] : runs.front().metrics) out << '\t' << name;
  }
  out << '\n';
  for (const auto& r : runs) {
    out << r.protocol << '\t' << fmt_num(r.x) << '\t' << r.seed;
    for (const auto& [_, v] : r.metrics) {
      out << '\t';
      if (v) out << fmt_num(*v);
    }
    out << '\n';
  }
}

}  // namespace rlpr
