#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "alsvm/committee.hpp"
#include "alsvm/dataset.hpp"
#include "alsvm/svm.hpp"

namespace alsvm {

enum class StrategyId { ClosestPA, ClosestNoPA, RandomPA, QBagPA, QBoostPA };

inline constexpr std::array<StrategyId, 5> kAllStrategies{
    StrategyId::ClosestPA, StrategyId::ClosestNoPA, StrategyId::RandomPA, StrategyId::QBagPA,
    StrategyId::QBoostPA};

/// CLI spelling: closest-pa, closest-nopa, random-pa, qbag-pa, qboost-pa.
std::string_view strategy_name(StrategyId s) noexcept;
std::optional<StrategyId> parse_strategy(std::string_view name) noexcept;

/// False only for ClosestNoPA, which always trains with pa = 1.
constexpr bool uses_pa(StrategyId s) noexcept { return s != StrategyId::ClosestNoPA; }
constexpr bool uses_committee(StrategyId s) noexcept {
  return s == StrategyId::QBagPA || s == StrategyId::QBoostPA;
}

struct SelectionContext {
  std::vector<ExampleId> labeled_ids;
  std::vector<ExampleId> unlabeled_ids;
  double pa = 1.0;
  std::size_t batch_size = 20;
  std::size_t committee_size = 5;
  std::uint64_t round_seed = 0;
  TrainConfig train_config;  // pa is overridden per strategy

  std::size_t batch_limit() const noexcept {
    return std::min(batch_size, unlabeled_ids.size());
  }
};

/// Whatever a strategy trains each round; the same object is evaluated.
using Learner = std::variant<SvmModel, Committee>;

Label predict(const Learner& learner, const SparseVector& x) noexcept;

/// Config a strategy trains with: ctx.pa for the PA strategies, 1 otherwise.
TrainConfig effective_config(StrategyId s, const SelectionContext& ctx);

/// Tie-break key for id under a round seed.
std::uint64_t tie_key(std::uint64_t round_seed, ExampleId id) noexcept;

/// Smallest |decision value| first; ties by tie_key.
std::vector<ExampleId> select_closest(const SvmModel& model, const Dataset& data,
                                      const SelectionContext& ctx);

/// Uniform draw without replacement, order as drawn.
std::vector<ExampleId> select_random(const SelectionContext& ctx);

/// Bagged: descending vote entropy. Boosted: ascending weighted vote margin.
/// Ties by smaller |mean member decision value|, then tie_key.
std::vector<ExampleId> select_qbc(const Committee& committee, const Dataset& data,
                                  const SelectionContext& ctx);

/// Trains the strategy's model or committee on ctx.labeled_ids.
Learner train_learner(StrategyId s, const Dataset& data, const SelectionContext& ctx);

struct Selection {
  Learner learner;
  std::vector<ExampleId> batch;
};

/// Picks the next batch from an already trained learner.
std::vector<ExampleId> select_with(StrategyId s, const Learner& learner, const Dataset& data,
                                   const SelectionContext& ctx);

Selection select_batch(StrategyId s, const Dataset& data, const SelectionContext& ctx);

}  // namespace alsvm
