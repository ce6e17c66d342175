#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alsvm/harness.hpp"

namespace alsvm {

// ---- learning-curve CSV ---------------------------------------------------
//   strategy,unit,num_labeled,tp,fp,fn,precision,recall,f1,pa
// Reals use fixed notation with 6 decimals.

inline constexpr const char* kCurveHeader = "strategy,unit,num_labeled,tp,fp,fn,precision,recall,f1,pa";

void write_curve_csv(std::ostream& out, const LearningCurve& curve, bool header = true);

/// Groups rows by (strategy, unit) in first-seen order. Throws
/// std::runtime_error on a bad header, malformed row or unknown strategy.
std::vector<LearningCurve> read_curve_csv(std::istream& in);

/// Reads every *.csv under `dir` whose header is the curve header, in
/// filename order.
std::vector<LearningCurve> load_curve_dir(const std::filesystem::path& dir);

/// `<strategy>_<unit>.csv`
std::string curve_file_name(const LearningCurve& curve);

/// Writes via a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// ---- utilization report ---------------------------------------------------

struct UtilizationRow {
  std::string unit;
  std::size_t total_size = 0;
  Utilization baseline;
  std::vector<Utilization> learners;  // aligned with UtilizationReport::learners
  std::vector<double> ratios;         // filled by make_utilization_report
  double target_f = 0.0;
};

struct UtilizationReport {
  std::string baseline;
  std::vector<std::string> learners;
  std::vector<UtilizationRow> rows;

  // Average row. Ratios are the mean of per-unit ratios, not a ratio of means.
  double mean_total_size = 0.0;
  double mean_baseline_count = 0.0;
  std::vector<double> mean_counts;
  std::vector<double> mean_ratios;
  double mean_target_f = 0.0;
};

/// Fills per-row ratios and the average row.
UtilizationReport make_utilization_report(std::string baseline, std::vector<std::string> learners,
                                          std::vector<UtilizationRow> rows);

/// One row per baseline unit. Every learner needs a curve for each of those
/// units; otherwise std::invalid_argument.
UtilizationReport utilization_from_curves(const std::vector<LearningCurve>& baseline,
                                          const std::map<std::string, std::vector<LearningCurve>>& learners,
                                          std::size_t window = 100);

//   unit,total_size,baseline_count,<s>_count,<s>_ratio,...,target_f,reached_flags
// plus a final `average` row.
void write_utilization_csv(std::ostream& out, const UtilizationReport& report);

struct TTestRow {
  std::string metric;  // "count" or "ratio"
  std::string a;
  std::string b;
  std::size_t n = 0;
  TTestResult result;
};

/// Paired tests over units for every pair of {baseline, learners...}, on
/// counts and on ratios.
std::vector<TTestRow> pairwise_t_tests(const UtilizationReport& report, double alpha = 0.05);

void write_ttest_csv(std::ostream& out, const std::vector<TTestRow>& rows);

struct PlateauMarker {
  std::string strategy;
  std::string unit;
  std::optional<std::size_t> num_labeled;
};

void write_plateau_csv(std::ostream& out, const std::vector<PlateauMarker>& markers);

}  // namespace alsvm
