#include "alsvm/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "alsvm/random.hpp"

namespace alsvm {

void TrainConfig::validate() const {
  if (!(c_negative > 0.0) || !std::isfinite(c_negative)) {
    throw std::invalid_argument("c_negative must be a positive finite value");
  }
  if (!(pa > 0.0) || !std::isfinite(pa)) throw std::invalid_argument("pa must be positive");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_passes < 1) throw std::invalid_argument("max_passes must be at least 1");
}

TrainConfig TrainConfig::from_costs(double c_positive, double c_negative) {
  TrainConfig c;
  c.c_negative = c_negative;
  c.pa = c_positive / c_negative;
  return c;
}

SvmModel SvmModel::from_hyperplane(std::vector<double> weights, double bias) {
  SvmModel m;
  m.weights_ = std::move(weights);
  m.bias_ = bias;
  return m;
}

double SvmModel::decision_value(const SparseVector& x) const noexcept {
  return dot(weights_, x) + bias_;
}

Label SvmModel::predict(const SparseVector& x) const noexcept {
  return label_from_decision(decision_value(x));
}

namespace {

void fill_slack(const Dataset& data, std::span<const ExampleId> ids, const SvmModel& m,
                TrainDiagnostics& diag) {
  diag.slack_sum_pos = 0.0;
  diag.slack_sum_neg = 0.0;
  for (ExampleId id : ids) {
    const auto& ex = data[id];
    const double slack = std::max(0.0, 1.0 - sign(ex.label) * m.decision_value(ex.features));
    (ex.label == Label::Positive ? diag.slack_sum_pos : diag.slack_sum_neg) += slack;
  }
}

double projected_gradient(double g, double alpha, double cap) {
  if (alpha <= 0.0) return std::min(g, 0.0);
  if (alpha >= cap) return std::max(g, 0.0);
  return g;
}

}  // namespace

SvmModel train(const Dataset& data, std::span<const ExampleId> labeled, const TrainConfig& config,
               std::uint64_t seed) {
  config.validate();
  if (labeled.empty()) throw std::invalid_argument("cannot train on an empty labeled set");

  std::size_t positives = 0;
  for (ExampleId id : labeled) {
    if (id >= data.size()) throw std::invalid_argument("labeled id out of range");
    const auto& ex = data[id];
    if (!ex.features.all_finite()) {
      throw std::invalid_argument("non-finite feature value in example " + std::to_string(id));
    }
    if (ex.label == Label::Positive) ++positives;
  }

  const std::size_t n = labeled.size();
  SvmModel m;
  m.config_ = config;
  m.training_ids_.assign(labeled.begin(), labeled.end());
  m.alphas_.assign(n, 0.0);
  m.weights_.assign(static_cast<std::size_t>(data.num_features()) + 1, 0.0);

  if (positives == 0 || positives == n) {
    m.bias_ = positives == 0 ? -1.0 : 1.0;
    m.diagnostics_.converged = true;
    fill_slack(data, labeled, m, m.diagnostics_);
    return m;
  }

  const LinearKernel kernel;
  std::vector<double> diag_q(n), cap(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ex = data[labeled[i]];
    diag_q[i] = kernel(ex.features, ex.features) + 1.0;
    cap[i] = config.cost_for(ex.label);
    y[i] = sign(ex.label);
  }

  auto& w = m.weights_;
  auto& b = m.bias_;
  auto& alpha = m.alphas_;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);

  auto& diag = m.diagnostics_;
  auto max_violation = [&] {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = y[i] * m.decision_value(data[labeled[i]].features) - 1.0;
      worst = std::max(worst, std::abs(projected_gradient(g, alpha[i], cap[i])));
    }
    return worst;
  };
  for (int pass = 0; pass < config.max_passes; ++pass) {
    rng.shuffle(std::span<std::size_t>(order));
    double max_pg = 0.0;
    for (std::size_t i : order) {
      const auto& x = data[labeled[i]].features;
      const double g = y[i] * (dot(w, x) + b) - 1.0;
      const double pg = projected_gradient(g, alpha[i], cap[i]);
      max_pg = std::max(max_pg, std::abs(pg));
      if (std::abs(pg) <= 1e-12) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / diag_q[i], 0.0, cap[i]);
      const double step = (alpha[i] - old) * y[i];
      if (step == 0.0) continue;
      for (const auto& e : x.entries()) w[e.id] += step * e.value;
      b += step;
    }
    diag.passes = pass + 1;
    // Gradients seen during the pass go stale as later coordinates move, so
    // a quiet pass is confirmed against the final iterate.
    if (max_pg <= config.tolerance && max_violation() <= config.tolerance) {
      diag.converged = true;
      break;
    }
  }

  diag.max_violation = max_violation();
  double w2 = b * b;
  for (double v : w) w2 += v * v;
  diag.dual_objective = std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * w2;
  fill_slack(data, labeled, m, diag);
  return m;
}

void write_model(std::ostream& out, const SvmModel& model) {
  const auto old_precision = out.precision(17);
  out << "bias " << model.bias() << '\n';
  const auto w = model.weights();
  for (std::size_t id = 1; id < w.size(); ++id) {
    if (w[id] != 0.0) out << "w " << id << ' ' << w[id] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace alsvm
