#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alsvm/dataset.hpp"
#include "alsvm/strategies.hpp"

namespace alsvm {

struct EvalPoint {
  std::size_t num_labeled = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 0.0;

  /// Precision and recall are 1 when their denominator is 0; F is 0 when
  /// precision + recall is 0.
  static EvalPoint from_counts(std::size_t num_labeled, std::size_t tp, std::size_t fp,
                               std::size_t fn);

  friend bool operator==(const EvalPoint&, const EvalPoint&) = default;
};

/// Hard-prediction counts of `learner` over the test ids.
EvalPoint evaluate(const Learner& learner, const Dataset& data, std::span<const ExampleId> test_ids,
                   std::size_t num_labeled = 0);

struct ALConfig {
  StrategyId strategy = StrategyId::ClosestPA;
  std::size_t batch_size = 20;
  std::size_t initial_size = 100;
  // When set, the initial size comes from corrected_sample_size over the
  // pool with these z / e and p = 0.5.
  bool auto_initial = false;
  double auto_z = 1.96;
  double auto_error = 0.05;
  std::size_t committee_size = 5;
  double c_negative = 1.0;
  double tolerance = 1e-4;
  int max_passes = 1000;
  std::uint64_t master_seed = 0;
  std::optional<std::size_t> budget;
};

struct LearningCurve {
  StrategyId strategy = StrategyId::ClosestPA;
  std::string unit;
  double pa_used = 1.0;
  std::vector<EvalPoint> points;

  std::size_t max_labeled() const noexcept { return points.empty() ? 0 : points.back().num_labeled; }
  friend bool operator==(const LearningCurve&, const LearningCurve&) = default;
};

/// One fold (or category) of an experiment. `index` feeds seed derivation.
struct SimulationUnit {
  std::string name;
  std::size_t index = 0;
  std::vector<ExampleId> pool_ids;
  std::vector<ExampleId> test_ids;
};

struct RoundInfo {
  std::size_t round = 0;
  std::span<const ExampleId> labeled;
  std::span<const ExampleId> unlabeled;
  std::span<const ExampleId> batch;
  double train_seconds = 0.0;
};

using RoundObserver = std::function<void(const RoundInfo&)>;

/// Resolved initial labeled-set size for a pool, honoring auto_initial.
std::size_t initial_size_for(const ALConfig& config, std::size_t pool_size);

/// Pool-based simulation: seeded initial sample, PA fixed from it, then
/// rounds of train / evaluate / select until the pool is empty or the budget
/// is met. Throws std::invalid_argument for an infeasible config before
/// doing any work.
LearningCurve run_simulation(const Dataset& data, const SimulationUnit& unit, const ALConfig& config,
                             const RoundObserver& observer = {});

/// Runs every (strategy, unit) pair on up to `workers` threads. The result is
/// ordered strategy-major, matching the input order, whatever the schedule.
std::vector<LearningCurve> run_experiment(const Dataset& data, std::span<const SimulationUnit> units,
                                          std::span<const StrategyId> strategies,
                                          const ALConfig& base, std::size_t workers);

/// Mean F over points with num_labeled > max_labeled - window.
double target_f(const LearningCurve& baseline, std::size_t window = 100);

struct Utilization {
  std::size_t count = 0;
  bool reached = false;
  friend bool operator==(const Utilization&, const Utilization&) = default;
};

/// First point whose F reaches `target` (1e-12 slack); otherwise the last
/// point, flagged unreached.
Utilization data_utilization(const LearningCurve& curve, double target);

struct TTestResult {
  double t = 0.0;
  double p_value = 1.0;
  std::size_t df = 0;
  bool significant = false;
};

/// Two-sided paired t-test on a_i - b_i at level `alpha`.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

struct PlateauParams {
  std::size_t window = 5;  // points
  double delta = 0.005;
  std::size_t patience = 3;
};

/// Windowed-mean F improvement at point i is mean(F[i-w+1..i]) - mean(F[i-w..i-1]).
/// Returns the num_labeled where the first run of `patience` consecutive
/// sub-delta improvements starts, or nullopt.
std::optional<std::size_t> detect_plateau(const LearningCurve& curve, const PlateauParams& params = {});

/// Mean F over points with start <= num_labeled < start + span. Throws when
/// no point falls in range.
double region_mean_f(const LearningCurve& curve, std::size_t start, std::size_t span);

/// Pointwise mean of precision, recall and F over curves with identical
/// num_labeled grids. Counts are summed; pa_used is averaged.
LearningCurve macro_average(std::span<const LearningCurve> curves, const std::string& unit = "macro");

}  // namespace alsvm
