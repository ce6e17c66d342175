#include "alsvm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "alsvm/prevalence.hpp"
#include "alsvm/random.hpp"

namespace alsvm {

EvalPoint EvalPoint::from_counts(std::size_t num_labeled, std::size_t tp, std::size_t fp,
                                 std::size_t fn) {
  EvalPoint p;
  p.num_labeled = num_labeled;
  p.tp = tp;
  p.fp = fp;
  p.fn = fn;
  p.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  p.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double denom = p.precision + p.recall;
  p.f1 = denom == 0.0 ? 0.0 : 2.0 * p.precision * p.recall / denom;
  return p;
}

EvalPoint evaluate(const Learner& learner, const Dataset& data, std::span<const ExampleId> test_ids,
                   std::size_t num_labeled) {
  if (test_ids.empty()) throw std::invalid_argument("test set is empty");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (ExampleId id : test_ids) {
    const auto& ex = data[id];
    const bool predicted = predict(learner, ex.features) == Label::Positive;
    const bool actual = ex.label == Label::Positive;
    if (predicted && actual) ++tp;
    else if (predicted) ++fp;
    else if (actual) ++fn;
  }
  return EvalPoint::from_counts(num_labeled, tp, fp, fn);
}

std::size_t initial_size_for(const ALConfig& config, std::size_t pool_size) {
  if (!config.auto_initial) return config.initial_size;
  if (pool_size < 2) return pool_size;
  SampleSizeSpec spec{config.auto_z, config.auto_error, 0.5, pool_size};
  return static_cast<std::size_t>(corrected_sample_size(spec));
}

namespace {

void validate(const ALConfig& config, const SimulationUnit& unit, const Dataset& data) {
  if (config.batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (config.committee_size < 1) throw std::invalid_argument("committee size must be at least 1");
  if (unit.pool_ids.empty()) throw std::invalid_argument("pool is empty");
  if (unit.test_ids.empty()) throw std::invalid_argument("test set is empty");
  std::vector<char> seen(data.size(), 0);
  for (auto ids : {std::span<const ExampleId>(unit.pool_ids), std::span<const ExampleId>(unit.test_ids)}) {
    for (ExampleId id : ids) {
      if (id >= data.size()) throw std::invalid_argument("example id out of range");
      if (seen[id]++) throw std::invalid_argument("pool and test ids overlap or repeat");
    }
  }
  const std::size_t init = initial_size_for(config, unit.pool_ids.size());
  if (init < 1 || init > unit.pool_ids.size()) {
    throw std::invalid_argument("initial size must lie in [1, pool size]");
  }
  if (config.budget && *config.budget < init) {
    throw std::invalid_argument("budget is smaller than the initial labeled set");
  }
  TrainConfig{config.c_negative, 1.0, config.tolerance, config.max_passes}.validate();
}

}  // namespace

LearningCurve run_simulation(const Dataset& data, const SimulationUnit& unit, const ALConfig& config,
                             const RoundObserver& observer) {
  validate(config, unit, data);
  const std::size_t init = initial_size_for(config, unit.pool_ids.size());

  std::vector<ExampleId> pool = unit.pool_ids;
  std::sort(pool.begin(), pool.end());
  Rng rng(derive_seed(config.master_seed, "initial-sample", unit.index));
  for (std::size_t i = 0; i < init; ++i) {
    std::swap(pool[i], pool[i + rng.uniform_index(pool.size() - i)]);
  }

  SelectionContext ctx;
  ctx.labeled_ids.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(init));
  ctx.unlabeled_ids.assign(pool.begin() + static_cast<std::ptrdiff_t>(init), pool.end());
  std::sort(ctx.labeled_ids.begin(), ctx.labeled_ids.end());
  std::sort(ctx.unlabeled_ids.begin(), ctx.unlabeled_ids.end());

  std::vector<Label> initial_labels;
  initial_labels.reserve(init);
  for (ExampleId id : ctx.labeled_ids) initial_labels.push_back(data[id].label);
  // Fixed for the whole run.
  ctx.pa = estimate_pa(initial_labels).pa;
  ctx.committee_size = config.committee_size;
  ctx.train_config = TrainConfig{config.c_negative, 1.0, config.tolerance, config.max_passes};

  LearningCurve curve;
  curve.strategy = config.strategy;
  curve.unit = unit.name;
  curve.pa_used = uses_pa(config.strategy) ? ctx.pa : 1.0;

  std::vector<ExampleId> merged;
  for (std::size_t round = 0;; ++round) {
    ctx.round_seed = derive_seed(config.master_seed, "round", unit.index, round);

    const auto t0 = std::chrono::steady_clock::now();
    Learner learner = train_learner(config.strategy, data, ctx);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;

    curve.points.push_back(evaluate(learner, data, unit.test_ids, ctx.labeled_ids.size()));

    const bool budget_met = config.budget && ctx.labeled_ids.size() >= *config.budget;
    std::vector<ExampleId> batch;
    if (!ctx.unlabeled_ids.empty() && !budget_met) {
      ctx.batch_size = config.batch_size;
      if (config.budget) {
        ctx.batch_size = std::min(ctx.batch_size, *config.budget - ctx.labeled_ids.size());
      }
      batch = select_with(config.strategy, learner, data, ctx);
    }
    if (observer) {
      observer(RoundInfo{round, ctx.labeled_ids, ctx.unlabeled_ids, batch, elapsed.count()});
    }
    if (batch.empty()) break;

    std::sort(batch.begin(), batch.end());
    merged.clear();
    std::merge(ctx.labeled_ids.begin(), ctx.labeled_ids.end(), batch.begin(), batch.end(),
               std::back_inserter(merged));
    ctx.labeled_ids.swap(merged);
    std::vector<ExampleId> remaining;
    remaining.reserve(ctx.unlabeled_ids.size() - batch.size());
    std::set_difference(ctx.unlabeled_ids.begin(), ctx.unlabeled_ids.end(), batch.begin(),
                        batch.end(), std::back_inserter(remaining));
    ctx.unlabeled_ids.swap(remaining);
  }
  return curve;
}

std::vector<LearningCurve> run_experiment(const Dataset& data, std::span<const SimulationUnit> units,
                                          std::span<const StrategyId> strategies,
                                          const ALConfig& base, std::size_t workers) {
  const std::size_t tasks = units.size() * strategies.size();
  std::vector<LearningCurve> results(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      ALConfig config = base;
      config.strategy = strategies[t / units.size()];
      try {
        results[t] = run_simulation(data, units[t % units.size()], config);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };

  const std::size_t n_threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(tasks, 1));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

double target_f(const LearningCurve& baseline, std::size_t window) {
  if (baseline.points.empty()) throw std::invalid_argument("baseline curve is empty");
  const std::size_t last = baseline.max_labeled();
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : baseline.points) {
    if (p.num_labeled + window > last) {
      sum += p.f1;
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

Utilization data_utilization(const LearningCurve& curve, double target) {
  for (const auto& p : curve.points) {
    if (p.f1 >= target - 1e-12) return {p.num_labeled, true};
  }
  return {curve.max_labeled(), false};
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() != b.size()) throw std::invalid_argument("paired samples differ in length");
  const std::size_t n = a.size();
  if (n < 2) throw std::invalid_argument("paired t-test needs at least 2 pairs");

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult r;
  r.df = n - 1;
  if (sd == 0.0) {
    if (mean == 0.0) return r;
    r.t = std::copysign(std::numeric_limits<double>::infinity(), mean);
    r.p_value = 0.0;
    r.significant = true;
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(r.df));
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  r.significant = r.p_value < alpha;
  return r;
}

std::optional<std::size_t> detect_plateau(const LearningCurve& curve, const PlateauParams& params) {
  if (params.window < 2) throw std::invalid_argument("plateau window must be at least 2");
  if (params.patience < 1) throw std::invalid_argument("plateau patience must be at least 1");
  const auto& pts = curve.points;
  const std::size_t w = params.window;
  auto window_mean = [&](std::size_t last) {
    double s = 0.0;
    for (std::size_t j = last + 1 - w; j <= last; ++j) s += pts[j].f1;
    return s / static_cast<double>(w);
  };

  std::size_t run = 0, run_start = 0;
  for (std::size_t i = w; i < pts.size(); ++i) {
    const double improvement = window_mean(i) - window_mean(i - 1);
    if (improvement < params.delta) {
      if (run++ == 0) run_start = i;
      if (run == params.patience) return pts[run_start].num_labeled;
    } else {
      run = 0;
    }
  }
  return std::nullopt;
}

double region_mean_f(const LearningCurve& curve, std::size_t start, std::size_t span) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : curve.points) {
    if (p.num_labeled >= start && p.num_labeled < start + span) {
      sum += p.f1;
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("no curve points in the requested region");
  return sum / static_cast<double>(count);
}

LearningCurve macro_average(std::span<const LearningCurve> curves, const std::string& unit) {
  if (curves.empty()) throw std::invalid_argument("nothing to average");
  const auto& first = curves.front();
  for (const auto& c : curves) {
    if (c.points.size() != first.points.size()) {
      throw std::invalid_argument("curves have different num_labeled grids");
    }
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      if (c.points[i].num_labeled != first.points[i].num_labeled) {
        throw std::invalid_argument("curves have different num_labeled grids");
      }
    }
  }

  const auto k = static_cast<double>(curves.size());
  LearningCurve out;
  out.strategy = first.strategy;
  out.unit = unit;
  out.pa_used = 0.0;
  for (const auto& c : curves) out.pa_used += c.pa_used / k;
  out.points.resize(first.points.size());
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    auto& p = out.points[i];
    p = EvalPoint{};
    p.num_labeled = first.points[i].num_labeled;
    p.precision = p.recall = p.f1 = 0.0;
    for (const auto& c : curves) {
      const auto& q = c.points[i];
      p.tp += q.tp;
      p.fp += q.fp;
      p.fn += q.fn;
      p.precision += q.precision / k;
      p.recall += q.recall / k;
      p.f1 += q.f1 / k;
    }
  }
  return out;
}

}  // namespace alsvm
