#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "alsvm/dataset.hpp"
#include "alsvm/svm.hpp"

namespace alsvm {

enum class CommitteeKind { Bagged, Boosted };

class Committee {
 public:
  /// Requires members.size() == weights.size() >= 1 and all weights > 0.
  Committee(CommitteeKind kind, std::vector<SvmModel> members, std::vector<double> weights);

  CommitteeKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return members_.size(); }
  std::span<const SvmModel> members() const noexcept { return members_; }
  std::span<const double> member_weights() const noexcept { return weights_; }
  double total_weight() const noexcept { return total_weight_; }

  std::size_t positive_votes(const SparseVector& x) const noexcept;

  /// Sum of weight * (+1/-1) over members.
  double weighted_vote(const SparseVector& x) const noexcept;

  /// Unweighted mean of the members' decision values.
  double mean_decision_value(const SparseVector& x) const noexcept;

  /// Weighted-vote sign; a tied vote goes negative.
  Label predict(const SparseVector& x) const noexcept {
    return label_from_decision(weighted_vote(x));
  }

 private:
  CommitteeKind kind_;
  std::vector<SvmModel> members_;
  std::vector<double> weights_;
  double total_weight_ = 0.0;
};

/// k members, each trained on a bootstrap resample of the labeled ids.
/// Single-class resamples are redrawn up to 10 times (only when the labeled
/// set itself has both classes) and then accepted. Member weights are 1.
Committee build_bagged_committee(const Dataset& data, std::span<const ExampleId> labeled,
                                 std::size_t k, const TrainConfig& config, std::uint64_t seed);

/// Per-round record of adaptive boosting, for inspection.
struct BoostRound {
  double weighted_error = 0.0;
  double beta = 0.0;
  double weight_sum = 0.0;  // example weights after renormalization
  bool kept = false;
};

/// Up to k rounds of adaptive boosting by weighted resampling. A round whose
/// weighted error reaches 0.5 is discarded and ends boosting; a zero-error
/// round is kept with beta = 1e-10 and ends boosting. When no round survives
/// the committee is one member trained on the full labeled set, weight 1.
Committee build_boosted_committee(const Dataset& data, std::span<const ExampleId> labeled,
                                  std::size_t k, const TrainConfig& config, std::uint64_t seed,
                                  std::vector<BoostRound>* trace = nullptr);

/// ln(1 / beta) with beta = eps / (1 - eps); eps = 0 maps to beta = 1e-10.
double boosting_member_weight(double weighted_error);

/// Binary entropy (bits) of the fraction of votes for +1.
double vote_entropy(std::size_t positive_votes, std::size_t members);
double vote_entropy(const Committee& c, const SparseVector& x);

/// |weighted vote| / total weight, in [0, 1]; 1 means unanimous.
double weighted_vote_margin(const Committee& c, const SparseVector& x);

}  // namespace alsvm
