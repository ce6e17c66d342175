#include "alsvm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "alsvm/dataset.hpp"
#include "alsvm/harness.hpp"
#include "alsvm/prevalence.hpp"
#include "alsvm/random.hpp"
#include "alsvm/report.hpp"
#include "alsvm/strategies.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace alsvm {

namespace {

/// Bad flag values detected after parsing; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string valid_strategy_list() {
  std::string s;
  for (StrategyId id : kAllStrategies) {
    if (!s.empty()) s += ", ";
    s += strategy_name(id);
  }
  return s;
}

StrategyId strategy_or_throw(const std::string& name) {
  if (auto s = parse_strategy(name)) return *s;
  throw UsageError("unknown strategy '" + name + "'; valid names: " + valid_strategy_list());
}

// ---- samplesize -----------------------------------------------------------

struct SampleSizeOptions {
  std::optional<std::uint64_t> population;
  std::optional<double> confidence;
  std::optional<double> z;
  std::optional<double> error;
  double prevalence = 0.5;
  std::optional<std::uint64_t> sample_size;
};

int cmd_samplesize(const SampleSizeOptions& o, std::ostream& out, std::ostream& err) {
  if (o.error && !(*o.error > 0.0 && *o.error < 1.0)) throw UsageError("--error must lie in (0, 1)");
  if (!o.error && !o.sample_size) throw UsageError("give --error, --sample-size, or both");
  if (!(o.prevalence >= 0.0 && o.prevalence <= 1.0)) throw UsageError("--prevalence must lie in [0, 1]");
  if (o.population && *o.population < 2) throw UsageError("--population must be at least 2");
  if (o.confidence && !(*o.confidence > 0.0 && *o.confidence < 1.0)) {
    throw UsageError("--confidence must lie in (0, 1)");
  }
  if (o.z && !(*o.z > 0.0)) throw UsageError("--z must be positive");

  const double z = o.z ? *o.z : z_for_confidence(o.confidence.value_or(0.95));
  const double p = o.prevalence;
  out << "z = " << fixed(z, 4) << '\n';
  out << "prevalence = " << fixed(p) << '\n';
  if (o.population) out << "population = " << *o.population << '\n';

  auto error_at = [&](std::uint64_t n) {
    if (o.population) return sampling_error(n, z, p, *o.population);
    return z * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  };
  auto warn_if_small = [&](std::uint64_t n) {
    const double pos = static_cast<double>(n) * p;
    const double neg = static_cast<double>(n) * (1.0 - p);
    if (pos < 5.0 || neg < 5.0) {
      err << "warning: expected class counts at n = " << n << " are " << fixed(pos, 2) << " positive / "
          << fixed(neg, 2) << " negative; the normal approximation needs at least 5 of each\n";
    }
  };

  if (o.error) {
    const double n0 = uncorrected_sample_size(z, p, *o.error);
    std::uint64_t n;
    if (o.population) {
      n = corrected_sample_size(SampleSizeSpec{z, *o.error, p, *o.population});
    } else {
      n = ceil_sample_size(n0);
    }
    out << "n0 = " << fixed(n0) << '\n';
    out << "n = " << n << '\n';
    if (n >= 1) {
      out << "achieved_error = " << fixed(error_at(n)) << '\n';
      warn_if_small(n);
    }
  }
  if (o.sample_size) {
    const auto n = *o.sample_size;
    if (n < 1) throw UsageError("--sample-size must be at least 1");
    if (o.population && n > *o.population) throw UsageError("--sample-size exceeds --population");
    out << "sampling_error(n=" << n << ") = " << fixed(error_at(n)) << '\n';
    warn_if_small(n);
  }
  return kExitOk;
}

// ---- gen-synth ------------------------------------------------------------

int cmd_gen_synth(const SyntheticSpec& spec, const std::string& path, std::ostream& out) {
  Dataset data;
  try {
    data = generate_synthetic(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::ostringstream text;
  write_sparse_text(text, data);
  write_file_atomic(path, text.str());
  out << "positives = " << data.positive_count() << '\n';
  out << "negatives = " << data.negative_count() << '\n';
  out << "prevalence = "
      << fixed(static_cast<double>(data.positive_count()) / static_cast<double>(data.size())) << '\n';
  return kExitOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateOptions {
  std::string data_path;
  std::string train_path;
  std::string test_path;
  std::vector<std::string> strategies;
  std::size_t folds = 10;
  std::size_t batch = 20;
  std::string init = "100";
  double init_error = 0.05;
  std::size_t committee = 5;
  double c_negative = 1.0;
  double tolerance = 1e-4;
  int max_passes = 1000;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
  std::size_t workers = 1;
  std::string out_dir;
  std::string from_manifest;
};

json options_to_json(const SimulateOptions& o, std::uint64_t seed) {
  json c;
  c["strategies"] = o.strategies;
  c["folds"] = o.folds;
  c["batch"] = o.batch;
  c["init"] = o.init;
  c["init_error"] = o.init_error;
  c["committee"] = o.committee;
  c["c_negative"] = o.c_negative;
  c["tolerance"] = o.tolerance;
  c["max_passes"] = o.max_passes;
  c["seed"] = seed;
  c["budget"] = o.budget ? json(*o.budget) : json(nullptr);
  return c;
}

void options_from_manifest(SimulateOptions& o, const json& m) {
  const auto& c = m.at("config");
  o.strategies = c.at("strategies").get<std::vector<std::string>>();
  o.folds = c.at("folds").get<std::size_t>();
  o.batch = c.at("batch").get<std::size_t>();
  o.init = c.at("init").get<std::string>();
  o.init_error = c.at("init_error").get<double>();
  o.committee = c.at("committee").get<std::size_t>();
  o.c_negative = c.at("c_negative").get<double>();
  o.tolerance = c.at("tolerance").get<double>();
  o.max_passes = c.at("max_passes").get<int>();
  o.seed = c.at("seed").get<std::uint64_t>();
  if (!c.at("budget").is_null()) o.budget = c.at("budget").get<std::size_t>();
  const auto& d = m.at("data");
  o.data_path = d.value("data", "");
  o.train_path = d.value("train", "");
  o.test_path = d.value("test", "");
}

Dataset concatenate(const Dataset& a, const Dataset& b) {
  std::vector<Dataset::Row> rows;
  rows.reserve(a.size() + b.size());
  for (const auto* d : {&a, &b}) {
    for (const auto& ex : d->examples()) rows.push_back({ex.label, ex.features});
  }
  return Dataset(std::move(rows));
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ALSVM_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("ALSVM_SEED is not an unsigned integer: ") + env);
  }
  return 0;
}

int cmd_simulate(SimulateOptions o, std::ostream& out) {
  std::uint64_t expected_fingerprint = 0;
  bool check_fingerprint = false;
  if (!o.from_manifest.empty()) {
    std::ifstream in(o.from_manifest);
    if (!in) throw std::runtime_error("cannot open manifest " + o.from_manifest);
    const json m = json::parse(in);
    options_from_manifest(o, m);
    expected_fingerprint = std::stoull(m.at("data").at("fingerprint").get<std::string>(), nullptr, 16);
    check_fingerprint = true;
  }

  if (o.strategies.empty()) throw UsageError("--strategy is required");
  std::vector<StrategyId> strategies;
  for (const auto& s : o.strategies) strategies.push_back(strategy_or_throw(s));
  if (o.out_dir.empty()) throw UsageError("--out is required");
  const bool split_mode = !o.train_path.empty() || !o.test_path.empty();
  if (split_mode == !o.data_path.empty()) throw UsageError("give either --data or --train/--test");
  if (split_mode && (o.train_path.empty() || o.test_path.empty())) {
    throw UsageError("--train and --test go together");
  }
  if (o.batch < 1) throw UsageError("--batch must be at least 1");
  if (o.committee < 1) throw UsageError("--committee must be at least 1");
  if (!(o.c_negative > 0.0)) throw UsageError("--c-neg must be positive");

  ALConfig base;
  base.batch_size = o.batch;
  base.committee_size = o.committee;
  base.c_negative = o.c_negative;
  base.tolerance = o.tolerance;
  base.max_passes = o.max_passes;
  base.budget = o.budget;
  base.master_seed = resolve_seed(o.seed);
  if (o.init == "auto") {
    base.auto_initial = true;
    base.auto_error = o.init_error;
    if (!(o.init_error > 0.0 && o.init_error < 1.0)) throw UsageError("--init-error must lie in (0, 1)");
  } else {
    try {
      std::size_t used = 0;
      base.initial_size = std::stoull(o.init, &used);
      if (used != o.init.size()) throw std::invalid_argument(o.init);
    } catch (const std::exception&) {
      throw UsageError("--init must be a positive integer or 'auto'");
    }
  }

  Dataset data;
  std::vector<SimulationUnit> units;
  json data_json;
  if (split_mode) {
    const Dataset train = load_sparse_text(o.train_path);
    const Dataset test = load_sparse_text(o.test_path);
    data = concatenate(train, test);
    SimulationUnit unit{"split", 0, {}, {}};
    for (ExampleId id = 0; id < data.size(); ++id) {
      (id < train.size() ? unit.pool_ids : unit.test_ids).push_back(id);
    }
    units.push_back(std::move(unit));
    data_json["train"] = o.train_path;
    data_json["test"] = o.test_path;
  } else {
    data = load_sparse_text(o.data_path);
    if (o.folds < 2 || o.folds > data.size()) throw UsageError("--folds out of range for this dataset");
    const auto width = std::to_string(o.folds).size();
    for (auto& split : kfold_split(data, o.folds, derive_seed(base.master_seed, "folds"))) {
      std::string idx = std::to_string(split.fold_index + 1);
      idx.insert(0, width - idx.size(), '0');
      units.push_back({"fold" + idx, split.fold_index, std::move(split.pool_ids), std::move(split.test_ids)});
    }
    data_json["data"] = o.data_path;
  }
  const std::uint64_t fp = fingerprint(data);
  if (check_fingerprint && fp != expected_fingerprint) {
    throw std::runtime_error("dataset fingerprint differs from the manifest");
  }
  data_json["fingerprint"] = hex64(fp);

  std::vector<std::string> artifacts;
  for (StrategyId s : strategies) {
    for (const auto& u : units) {
      artifacts.push_back(curve_file_name(LearningCurve{s, u.name, 1.0, {}}));
    }
  }

  fs::create_directories(o.out_dir);
  json manifest;
  manifest["version"] = kVersion;
  manifest["command"] = "simulate";
  manifest["config"] = options_to_json(o, base.master_seed);
  manifest["data"] = data_json;
  manifest["artifacts"] = artifacts;
  write_file_atomic(fs::path(o.out_dir) / "manifest.json", manifest.dump(2) + "\n");

  const auto curves = run_experiment(data, units, strategies, base, o.workers);

  std::vector<std::pair<std::string, const LearningCurve*>> files;
  for (const auto& c : curves) files.emplace_back(curve_file_name(c), &c);
  std::sort(files.begin(), files.end());
  for (const auto& [name, curve] : files) {
    std::ostringstream os;
    write_curve_csv(os, *curve);
    write_file_atomic(fs::path(o.out_dir) / name, os.str());
  }
  for (const auto& [name, curve] : files) {
    out << name << ": " << curve->points.size() << " points, pa = " << fixed(curve->pa_used)
        << ", final f1 = " << fixed(curve->points.back().f1) << '\n';
  }
  return kExitOk;
}

// ---- report ---------------------------------------------------------------

struct ReportOptions {
  std::string curves_dir;
  std::string baseline;
  std::vector<std::string> learners;
  std::size_t window = 100;
  std::string out_dir;
  PlateauParams plateau;
  bool macro = false;
};

int cmd_report(const ReportOptions& o, std::ostream& out) {
  const StrategyId baseline_id = strategy_or_throw(o.baseline);
  for (const auto& l : o.learners) strategy_or_throw(l);

  const auto curves = load_curve_dir(o.curves_dir);
  std::vector<LearningCurve> baseline;
  std::map<std::string, std::vector<LearningCurve>> learners;
  for (const auto& c : curves) {
    const std::string name(strategy_name(c.strategy));
    if (c.strategy == baseline_id) baseline.push_back(c);
    const bool wanted = o.learners.empty()
                            ? c.strategy != baseline_id
                            : std::find(o.learners.begin(), o.learners.end(), name) != o.learners.end();
    if (wanted) learners[name].push_back(c);
  }
  if (baseline.empty()) {
    throw std::runtime_error("no curves for baseline strategy '" + o.baseline + "' in " + o.curves_dir);
  }
  if (learners.empty()) throw std::runtime_error("no learner curves found besides the baseline");

  const auto report = utilization_from_curves(baseline, learners, o.window);
  const auto tests = pairwise_t_tests(report);
  std::vector<PlateauMarker> markers;
  for (const auto& c : curves) {
    markers.push_back({std::string(strategy_name(c.strategy)), c.unit, detect_plateau(c, o.plateau)});
  }

  const fs::path dir = o.out_dir.empty() ? fs::path(o.curves_dir) : fs::path(o.out_dir);
  fs::create_directories(dir);
  std::ostringstream util_csv, ttest_csv, plateau_csv;
  write_utilization_csv(util_csv, report);
  write_ttest_csv(ttest_csv, tests);
  write_plateau_csv(plateau_csv, markers);
  write_file_atomic(dir / "utilization.csv", util_csv.str());
  write_file_atomic(dir / "ttests.csv", ttest_csv.str());
  write_file_atomic(dir / "plateaus.csv", plateau_csv.str());

  if (o.macro) {
    fs::create_directories(dir / "macro");
    std::map<StrategyId, std::vector<LearningCurve>> by_strategy;
    for (const auto& c : curves) by_strategy[c.strategy].push_back(c);
    for (const auto& [s, group] : by_strategy) {
      std::ostringstream os;
      const auto avg = macro_average(group);
      write_curve_csv(os, avg);
      write_file_atomic(dir / "macro" / curve_file_name(avg), os.str());
    }
  }

  out << util_csv.str() << '\n';
  for (const auto& t : tests) {
    out << t.metric << ' ' << t.a << " vs " << t.b << ": t = " << fixed(t.result.t, 4)
        << ", p = " << fixed(t.result.p_value, 4)
        << (t.result.significant ? " (significant at 0.05)" : " (not significant)") << '\n';
  }
  return kExitOk;
}

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cost-sensitive pool-based active learning with linear SVMs", "alsvm"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SampleSizeOptions ss;
  auto* samplesize = app.add_subcommand("samplesize", "Initial sample size for estimating class prevalence");
  samplesize->add_option("--population,-N", ss.population, "Pool size N (omit for an infinite population)");
  auto* conf = samplesize->add_option("--confidence", ss.confidence, "Two-sided confidence level (default 0.95)");
  samplesize->add_option("--z", ss.z, "Normal score, instead of --confidence")->excludes(conf);
  samplesize->add_option("--error,-e", ss.error, "Acceptable sampling error e");
  samplesize->add_option("--prevalence,-p", ss.prevalence, "Planning proportion p (default 0.5)");
  samplesize->add_option("--sample-size,-n", ss.sample_size, "Report the sampling error at this n");

  SyntheticSpec synth;
  std::string synth_out;
  auto* gen = app.add_subcommand("gen-synth", "Write a synthetic imbalanced dataset");
  gen->add_option("--n", synth.n, "Number of examples")->required();
  gen->add_option("--positive-fraction", synth.positive_fraction, "Share of positives")->required();
  gen->add_option("--clusters", synth.num_clusters, "Gaussian clusters per class");
  gen->add_option("--overlap", synth.overlap, "Label-side noise; 0 keeps the classes separable");
  gen->add_option("--dim", synth.dimension, "Dimension (2..20)");
  gen->add_option("--duplicates", synth.duplicate_fraction, "Share of near-duplicate examples");
  gen->add_option("--seed", synth.seed, "Random seed");
  gen->add_option("--out,-o", synth_out, "Output path")->required();

  SimulateOptions sim;
  std::vector<std::string> sim_strategies;
  auto* simulate = app.add_subcommand("simulate", "Run active-learning simulations and write learning curves");
  simulate->add_option("--data", sim.data_path, "Dataset split into folds");
  simulate->add_option("--train", sim.train_path, "Pool dataset (with --test)");
  simulate->add_option("--test", sim.test_path, "Held-out test dataset (with --train)");
  simulate->add_option("--strategy,-s", sim_strategies, "Strategies, comma separated: " + valid_strategy_list());
  simulate->add_option("--folds", sim.folds, "Cross-validation folds (default 10)");
  simulate->add_option("--batch", sim.batch, "Batch size (default 20)");
  simulate->add_option("--init", sim.init, "Initial labeled size or 'auto' (default 100)");
  simulate->add_option("--init-error", sim.init_error, "Sampling error for --init auto (default 0.05)");
  simulate->add_option("--committee", sim.committee, "Committee size for QBC strategies (default 5)");
  simulate->add_option("--c-neg", sim.c_negative, "Negative-class cost C- (default 1)");
  simulate->add_option("--tolerance", sim.tolerance, "Solver KKT tolerance (default 1e-4)");
  simulate->add_option("--max-passes", sim.max_passes, "Solver pass limit (default 1000)");
  simulate->add_option("--seed", sim.seed, "Master seed (else $ALSVM_SEED, else 0)");
  simulate->add_option("--budget", sim.budget, "Stop once this many examples are labeled");
  simulate->add_option("--workers,-j", sim.workers, "Worker threads (default 1)");
  simulate->add_option("--out,-o", sim.out_dir, "Output directory")->required();
  simulate->add_option("--from-manifest", sim.from_manifest, "Re-run the configuration recorded in a manifest");

  ReportOptions rep;
  std::vector<std::string> rep_learners;
  auto* report = app.add_subcommand("report", "Data-utilization report, t-tests and plateau markers");
  report->add_option("--curves", rep.curves_dir, "Directory of learning-curve CSVs")->required();
  report->add_option("--baseline", rep.baseline, "Baseline strategy")->required();
  report->add_option("--learners", rep_learners, "Learners to compare (default: all others)");
  report->add_option("--window", rep.window, "Target-F window in labeled examples (default 100)");
  report->add_option("--out,-o", rep.out_dir, "Output directory (default: --curves)");
  report->add_option("--plateau-window", rep.plateau.window, "Plateau window in points (default 5)");
  report->add_option("--plateau-delta", rep.plateau.delta, "Plateau F-improvement threshold (default 0.005)");
  report->add_option("--plateau-patience", rep.plateau.patience, "Plateau patience (default 3)");
  report->add_flag("--macro", rep.macro, "Also write macro-averaged curves per strategy");

  std::vector<const char*> argv{"alsvm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*samplesize) return cmd_samplesize(ss, out, err);
    if (*gen) return cmd_gen_synth(synth, synth_out, out);
    if (*simulate) {
      sim.strategies = split_list(sim_strategies);
      return cmd_simulate(sim, out);
    }
    if (*report) {
      rep.learners = split_list(rep_learners);
      return cmd_report(rep, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace alsvm
