#include "alsvm/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace alsvm {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, std::size_t lineno) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw std::runtime_error("curve csv line " + std::to_string(lineno) + ": bad number '" +
                             std::string(s) + "'");
  }
  return v;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

void write_curve_csv(std::ostream& out, const LearningCurve& curve, bool header) {
  if (header) out << kCurveHeader << '\n';
  const std::string name(strategy_name(curve.strategy));
  const std::string pa = fixed6(curve.pa_used);
  for (const auto& p : curve.points) {
    out << name << ',' << curve.unit << ',' << p.num_labeled << ',' << p.tp << ',' << p.fp << ','
        << p.fn << ',' << fixed6(p.precision) << ',' << fixed6(p.recall) << ',' << fixed6(p.f1)
        << ',' << pa << '\n';
  }
}

std::vector<LearningCurve> read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kCurveHeader) {
    throw std::runtime_error("not a learning-curve csv (header mismatch)");
  }
  std::vector<LearningCurve> curves;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = strip_cr(line);
    if (row.empty()) continue;
    const auto f = split_csv(row);
    if (f.size() != 10) {
      throw std::runtime_error("curve csv line " + std::to_string(lineno) + ": expected 10 fields");
    }
    const auto strategy = parse_strategy(f[0]);
    if (!strategy) {
      throw std::runtime_error("curve csv line " + std::to_string(lineno) + ": unknown strategy '" +
                               std::string(f[0]) + "'");
    }
    const std::string unit(f[1]);
    auto it = std::find_if(curves.begin(), curves.end(), [&](const LearningCurve& c) {
      return c.strategy == *strategy && c.unit == unit;
    });
    if (it == curves.end()) {
      curves.push_back(LearningCurve{*strategy, unit, parse_number<double>(f[9], lineno), {}});
      it = std::prev(curves.end());
    }
    EvalPoint p;
    p.num_labeled = parse_number<std::size_t>(f[2], lineno);
    p.tp = parse_number<std::size_t>(f[3], lineno);
    p.fp = parse_number<std::size_t>(f[4], lineno);
    p.fn = parse_number<std::size_t>(f[5], lineno);
    p.precision = parse_number<double>(f[6], lineno);
    p.recall = parse_number<double>(f[7], lineno);
    p.f1 = parse_number<double>(f[8], lineno);
    if (!it->points.empty() && p.num_labeled <= it->points.back().num_labeled) {
      throw std::runtime_error("curve csv line " + std::to_string(lineno) +
                               ": num_labeled not increasing");
    }
    it->points.push_back(p);
  }
  return curves;
}

std::vector<LearningCurve> load_curve_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<LearningCurve> curves;
  for (const auto& path : files) {
    std::ifstream in(path);
    std::string header;
    if (!std::getline(in, header) || strip_cr(header) != kCurveHeader) continue;
    in.seekg(0);
    for (auto& c : read_curve_csv(in)) curves.push_back(std::move(c));
  }
  return curves;
}

std::string curve_file_name(const LearningCurve& curve) {
  return std::string(strategy_name(curve.strategy)) + "_" + curve.unit + ".csv";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

UtilizationReport make_utilization_report(std::string baseline, std::vector<std::string> learners,
                                          std::vector<UtilizationRow> rows) {
  if (rows.empty()) throw std::invalid_argument("utilization report needs at least one unit");
  UtilizationReport r;
  r.baseline = std::move(baseline);
  r.learners = std::move(learners);
  r.rows = std::move(rows);
  const std::size_t k = r.learners.size();
  const auto units = static_cast<double>(r.rows.size());
  r.mean_counts.assign(k, 0.0);
  r.mean_ratios.assign(k, 0.0);

  for (auto& row : r.rows) {
    if (row.learners.size() != k) throw std::invalid_argument("row/learner count mismatch");
    if (row.baseline.count == 0) throw std::invalid_argument("baseline count must be positive");
    row.ratios.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      row.ratios[j] =
          static_cast<double>(row.learners[j].count) / static_cast<double>(row.baseline.count);
    }
  }
  // Summed in row order, then divided once.
  for (const auto& row : r.rows) {
    r.mean_total_size += static_cast<double>(row.total_size);
    r.mean_baseline_count += static_cast<double>(row.baseline.count);
    r.mean_target_f += row.target_f;
    for (std::size_t j = 0; j < k; ++j) {
      r.mean_counts[j] += static_cast<double>(row.learners[j].count);
      r.mean_ratios[j] += row.ratios[j];
    }
  }
  r.mean_total_size /= units;
  r.mean_baseline_count /= units;
  r.mean_target_f /= units;
  for (std::size_t j = 0; j < k; ++j) {
    r.mean_counts[j] /= units;
    r.mean_ratios[j] /= units;
  }
  return r;
}

UtilizationReport utilization_from_curves(const std::vector<LearningCurve>& baseline,
                                          const std::map<std::string, std::vector<LearningCurve>>& learners,
                                          std::size_t window) {
  if (baseline.empty()) throw std::invalid_argument("no baseline curves");
  std::vector<std::string> names;
  for (const auto& [name, curves] : learners) names.push_back(name);

  std::vector<UtilizationRow> rows;
  for (const auto& base : baseline) {
    UtilizationRow row;
    row.unit = base.unit;
    row.total_size = base.max_labeled();
    row.target_f = target_f(base, window);
    row.baseline = data_utilization(base, row.target_f);
    for (const auto& [name, curves] : learners) {
      auto it = std::find_if(curves.begin(), curves.end(),
                             [&](const LearningCurve& c) { return c.unit == base.unit; });
      if (it == curves.end()) {
        throw std::invalid_argument("learner " + name + " has no curve for unit " + base.unit);
      }
      row.learners.push_back(data_utilization(*it, row.target_f));
    }
    rows.push_back(std::move(row));
  }
  const std::string base_name(strategy_name(baseline.front().strategy));
  return make_utilization_report(base_name, std::move(names), std::move(rows));
}

void write_utilization_csv(std::ostream& out, const UtilizationReport& report) {
  out << "unit,total_size,baseline_count";
  for (const auto& name : report.learners) out << ',' << name << "_count," << name << "_ratio";
  out << ",target_f,reached_flags\n";

  for (const auto& row : report.rows) {
    out << row.unit << ',' << row.total_size << ',' << row.baseline.count;
    for (std::size_t j = 0; j < report.learners.size(); ++j) {
      out << ',' << row.learners[j].count << ',' << fixed6(row.ratios[j]);
    }
    out << ',' << fixed6(row.target_f) << ',' << report.baseline << ':' << (row.baseline.reached ? 1 : 0);
    for (std::size_t j = 0; j < report.learners.size(); ++j) {
      out << ';' << report.learners[j] << ':' << (row.learners[j].reached ? 1 : 0);
    }
    out << '\n';
  }

  const std::size_t units = report.rows.size();
  auto reached_count = [&](auto pick) {
    return std::count_if(report.rows.begin(), report.rows.end(), pick);
  };
  out << "average," << fixed6(report.mean_total_size) << ',' << fixed6(report.mean_baseline_count);
  for (std::size_t j = 0; j < report.learners.size(); ++j) {
    out << ',' << fixed6(report.mean_counts[j]) << ',' << fixed6(report.mean_ratios[j]);
  }
  out << ',' << fixed6(report.mean_target_f) << ',' << report.baseline << ':'
      << reached_count([](const UtilizationRow& r) { return r.baseline.reached; }) << '/' << units;
  for (std::size_t j = 0; j < report.learners.size(); ++j) {
    out << ';' << report.learners[j] << ':'
        << reached_count([j](const UtilizationRow& r) { return r.learners[j].reached; }) << '/'
        << units;
  }
  out << '\n';
}

std::vector<TTestRow> pairwise_t_tests(const UtilizationReport& report, double alpha) {
  struct Series {
    std::string name;
    std::vector<double> counts;
    std::vector<double> ratios;
  };
  std::vector<Series> series;
  Series base{report.baseline, {}, {}};
  for (const auto& row : report.rows) {
    base.counts.push_back(static_cast<double>(row.baseline.count));
    base.ratios.push_back(1.0);
  }
  series.push_back(std::move(base));
  for (std::size_t j = 0; j < report.learners.size(); ++j) {
    Series s{report.learners[j], {}, {}};
    for (const auto& row : report.rows) {
      s.counts.push_back(static_cast<double>(row.learners[j].count));
      s.ratios.push_back(row.ratios[j]);
    }
    series.push_back(std::move(s));
  }

  std::vector<TTestRow> out;
  if (report.rows.size() < 2) return out;
  for (const char* metric : {"count", "ratio"}) {
    const bool counts = std::string_view(metric) == "count";
    for (std::size_t i = 0; i < series.size(); ++i) {
      for (std::size_t j = i + 1; j < series.size(); ++j) {
        const auto& a = counts ? series[i].counts : series[i].ratios;
        const auto& b = counts ? series[j].counts : series[j].ratios;
        out.push_back({metric, series[i].name, series[j].name, a.size(), paired_t_test(a, b, alpha)});
      }
    }
  }
  return out;
}

void write_ttest_csv(std::ostream& out, const std::vector<TTestRow>& rows) {
  out << "metric,a,b,n,t,p_value,significant\n";
  for (const auto& r : rows) {
    out << r.metric << ',' << r.a << ',' << r.b << ',' << r.n << ',' << fixed6(r.result.t) << ','
        << fixed6(r.result.p_value) << ',' << (r.result.significant ? 1 : 0) << '\n';
  }
}

void write_plateau_csv(std::ostream& out, const std::vector<PlateauMarker>& markers) {
  out << "strategy,unit,plateau_num_labeled\n";
  for (const auto& m : markers) {
    out << m.strategy << ',' << m.unit << ',';
    if (m.num_labeled) {
      out << *m.num_labeled;
    } else {
      out << "none";
    }
    out << '\n';
  }
}

}  // namespace alsvm
