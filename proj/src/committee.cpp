#include "alsvm/committee.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "alsvm/random.hpp"

namespace alsvm {

Committee::Committee(CommitteeKind kind, std::vector<SvmModel> members, std::vector<double> weights)
    : kind_(kind), members_(std::move(members)), weights_(std::move(weights)) {
  if (members_.empty()) throw std::invalid_argument("committee needs at least one member");
  if (members_.size() != weights_.size()) {
    throw std::invalid_argument("committee member and weight counts differ");
  }
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("member weights must be positive");
  }
  total_weight_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

std::size_t Committee::positive_votes(const SparseVector& x) const noexcept {
  std::size_t votes = 0;
  for (const auto& m : members_) votes += m.predict(x) == Label::Positive ? 1 : 0;
  return votes;
}

double Committee::weighted_vote(const SparseVector& x) const noexcept {
  double s = 0.0;
  for (std::size_t t = 0; t < members_.size(); ++t) s += weights_[t] * sign(members_[t].predict(x));
  return s;
}

double Committee::mean_decision_value(const SparseVector& x) const noexcept {
  double s = 0.0;
  for (const auto& m : members_) s += m.decision_value(x);
  return s / static_cast<double>(members_.size());
}

namespace {

bool has_both_classes(const Dataset& data, std::span<const ExampleId> ids) {
  bool pos = false, neg = false;
  for (ExampleId id : ids) {
    (data[id].label == Label::Positive ? pos : neg) = true;
    if (pos && neg) return true;
  }
  return false;
}

void check_inputs(std::span<const ExampleId> labeled, std::size_t k) {
  if (labeled.empty()) throw std::invalid_argument("cannot build a committee from no labels");
  if (k < 1) throw std::invalid_argument("committee size must be at least 1");
}

}  // namespace

Committee build_bagged_committee(const Dataset& data, std::span<const ExampleId> labeled,
                                 std::size_t k, const TrainConfig& config, std::uint64_t seed) {
  check_inputs(labeled, k);
  constexpr int kMaxRedraws = 10;
  const bool mixed = has_both_classes(data, labeled);
  const std::size_t n = labeled.size();

  std::vector<SvmModel> members;
  members.reserve(k);
  std::vector<ExampleId> bag(n);
  for (std::size_t t = 0; t < k; ++t) {
    Rng rng(derive_seed(seed, "bag-draw", t));
    for (int attempt = 0;; ++attempt) {
      for (auto& id : bag) id = labeled[rng.uniform_index(n)];
      if (!mixed || attempt == kMaxRedraws || has_both_classes(data, bag)) break;
    }
    members.push_back(train(data, bag, config, derive_seed(seed, "bag-train", t)));
  }
  return Committee(CommitteeKind::Bagged, std::move(members), std::vector<double>(k, 1.0));
}

double boosting_member_weight(double weighted_error) {
  if (!(weighted_error >= 0.0 && weighted_error < 0.5)) {
    throw std::invalid_argument("boosting weight needs an error in [0, 0.5)");
  }
  const double beta = weighted_error == 0.0 ? 1e-10 : weighted_error / (1.0 - weighted_error);
  return std::log(1.0 / beta);
}

Committee build_boosted_committee(const Dataset& data, std::span<const ExampleId> labeled,
                                  std::size_t k, const TrainConfig& config, std::uint64_t seed,
                                  std::vector<BoostRound>* trace) {
  check_inputs(labeled, k);
  const std::size_t n = labeled.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> cumulative(n);
  std::vector<ExampleId> sample(n);
  std::vector<char> correct(n);

  std::vector<SvmModel> members;
  std::vector<double> member_weights;
  if (trace) trace->clear();

  for (std::size_t t = 0; t < k; ++t) {
    std::partial_sum(w.begin(), w.end(), cumulative.begin());
    Rng rng(derive_seed(seed, "boost-draw", t));
    const double total = cumulative.back();
    for (auto& id : sample) {
      const double u = rng.uniform01() * total;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      if (it == cumulative.end()) --it;
      id = labeled[static_cast<std::size_t>(it - cumulative.begin())];
    }
    SvmModel member = train(data, sample, config, derive_seed(seed, "boost-train", t));

    double eps = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& ex = data[labeled[i]];
      correct[i] = member.predict(ex.features) == ex.label;
      if (!correct[i]) eps += w[i];
    }

    BoostRound round;
    round.weighted_error = eps;
    if (eps >= 0.5) {
      round.weight_sum = std::accumulate(w.begin(), w.end(), 0.0);
      if (trace) trace->push_back(round);
      break;
    }
    round.kept = true;
    if (eps <= 0.0) {
      round.beta = 1e-10;
      round.weight_sum = std::accumulate(w.begin(), w.end(), 0.0);
      if (trace) trace->push_back(round);
      members.push_back(std::move(member));
      member_weights.push_back(boosting_member_weight(0.0));
      break;
    }
    const double beta = eps / (1.0 - eps);
    round.beta = beta;
    for (std::size_t i = 0; i < n; ++i) {
      if (correct[i]) w[i] *= beta;
    }
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& v : w) v /= sum;
    round.weight_sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (trace) trace->push_back(round);
    members.push_back(std::move(member));
    member_weights.push_back(std::log(1.0 / beta));
  }

  if (members.empty()) {
    members.push_back(train(data, labeled, config, derive_seed(seed, "boost-fallback")));
    member_weights.push_back(1.0);
  }
  return Committee(CommitteeKind::Boosted, std::move(members), std::move(member_weights));
}

double vote_entropy(std::size_t positive_votes, std::size_t members) {
  if (members == 0 || positive_votes > members) {
    throw std::invalid_argument("vote counts out of range");
  }
  // Evaluate on the minority side so a label flip gives bit-identical results.
  const std::size_t minority = std::min(positive_votes, members - positive_votes);
  const double v = static_cast<double>(minority) / static_cast<double>(members);
  auto term = [](double q) { return q > 0.0 ? -q * std::log2(q) : 0.0; };
  return term(v) + term(1.0 - v);
}

double vote_entropy(const Committee& c, const SparseVector& x) {
  return vote_entropy(c.positive_votes(x), c.size());
}

double weighted_vote_margin(const Committee& c, const SparseVector& x) {
  return std::abs(c.weighted_vote(x)) / c.total_weight();
}

}  // namespace alsvm
