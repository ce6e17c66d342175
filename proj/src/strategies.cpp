#include "alsvm/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "alsvm/random.hpp"

namespace alsvm {

std::string_view strategy_name(StrategyId s) noexcept {
  switch (s) {
    case StrategyId::ClosestPA: return "closest-pa";
    case StrategyId::ClosestNoPA: return "closest-nopa";
    case StrategyId::RandomPA: return "random-pa";
    case StrategyId::QBagPA: return "qbag-pa";
    case StrategyId::QBoostPA: return "qboost-pa";
  }
  return "unknown";
}

std::optional<StrategyId> parse_strategy(std::string_view name) noexcept {
  for (StrategyId s : kAllStrategies) {
    if (strategy_name(s) == name) return s;
  }
  return std::nullopt;
}

Label predict(const Learner& learner, const SparseVector& x) noexcept {
  return std::visit([&](const auto& l) { return l.predict(x); }, learner);
}

TrainConfig effective_config(StrategyId s, const SelectionContext& ctx) {
  TrainConfig c = ctx.train_config;
  c.pa = uses_pa(s) ? ctx.pa : 1.0;
  return c;
}

std::uint64_t tie_key(std::uint64_t round_seed, ExampleId id) noexcept {
  return mix64(mix64(round_seed) ^ static_cast<std::uint64_t>(id));
}

namespace {

// Sorts `scored` by its key tuple and returns the first `limit` ids.
template <typename Key>
std::vector<ExampleId> take_best(std::vector<std::pair<Key, ExampleId>>& scored, std::size_t limit) {
  auto mid = scored.begin() + static_cast<std::ptrdiff_t>(limit);
  std::partial_sort(scored.begin(), mid, scored.end());
  std::vector<ExampleId> out;
  out.reserve(limit);
  for (auto it = scored.begin(); it != mid; ++it) out.push_back(it->second);
  return out;
}

}  // namespace

std::vector<ExampleId> select_closest(const SvmModel& model, const Dataset& data,
                                      const SelectionContext& ctx) {
  using Key = std::tuple<double, std::uint64_t>;
  std::vector<std::pair<Key, ExampleId>> scored;
  scored.reserve(ctx.unlabeled_ids.size());
  for (ExampleId id : ctx.unlabeled_ids) {
    const double margin = std::abs(model.decision_value(data[id].features));
    scored.push_back({{margin, tie_key(ctx.round_seed, id)}, id});
  }
  return take_best(scored, ctx.batch_limit());
}

std::vector<ExampleId> select_random(const SelectionContext& ctx) {
  std::vector<ExampleId> pool = ctx.unlabeled_ids;
  const std::size_t limit = ctx.batch_limit();
  Rng rng(derive_seed(ctx.round_seed, "random-select"));
  for (std::size_t i = 0; i < limit; ++i) {
    const std::size_t j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(limit);
  return pool;
}

std::vector<ExampleId> select_qbc(const Committee& committee, const Dataset& data,
                                  const SelectionContext& ctx) {
  // Lower key = more disagreement.
  using Key = std::tuple<double, double, std::uint64_t>;
  std::vector<std::pair<Key, ExampleId>> scored;
  scored.reserve(ctx.unlabeled_ids.size());
  const bool bagged = committee.kind() == CommitteeKind::Bagged;
  for (ExampleId id : ctx.unlabeled_ids) {
    const auto& x = data[id].features;
    const double disagreement =
        bagged ? -vote_entropy(committee, x) : weighted_vote_margin(committee, x);
    scored.push_back(
        {{disagreement, std::abs(committee.mean_decision_value(x)), tie_key(ctx.round_seed, id)}, id});
  }
  return take_best(scored, ctx.batch_limit());
}

Learner train_learner(StrategyId s, const Dataset& data, const SelectionContext& ctx) {
  const TrainConfig config = effective_config(s, ctx);
  switch (s) {
    case StrategyId::QBagPA:
      return build_bagged_committee(data, ctx.labeled_ids, ctx.committee_size, config,
                                    derive_seed(ctx.round_seed, "committee"));
    case StrategyId::QBoostPA:
      return build_boosted_committee(data, ctx.labeled_ids, ctx.committee_size, config,
                                     derive_seed(ctx.round_seed, "committee"));
    default:
      return train(data, ctx.labeled_ids, config, derive_seed(ctx.round_seed, "train"));
  }
}

std::vector<ExampleId> select_with(StrategyId s, const Learner& learner, const Dataset& data,
                                   const SelectionContext& ctx) {
  if (ctx.batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  switch (s) {
    case StrategyId::RandomPA:
      return select_random(ctx);
    case StrategyId::QBagPA:
    case StrategyId::QBoostPA:
      return select_qbc(std::get<Committee>(learner), data, ctx);
    default:
      return select_closest(std::get<SvmModel>(learner), data, ctx);
  }
}

Selection select_batch(StrategyId s, const Dataset& data, const SelectionContext& ctx) {
  Learner learner = train_learner(s, data, ctx);
  auto batch = select_with(s, learner, data, ctx);
  return {std::move(learner), std::move(batch)};
}

}  // namespace alsvm
