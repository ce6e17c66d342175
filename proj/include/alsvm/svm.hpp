#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "alsvm/dataset.hpp"

namespace alsvm {

/// Asymmetric-cost soft-margin settings. The positive-class cost is
/// derived as pa * c_negative.
struct TrainConfig {
  double c_negative = 1.0;
  double pa = 1.0;
  double tolerance = 1e-4;
  int max_passes = 1000;

  double c_positive() const noexcept { return pa * c_negative; }
  double cost_for(Label y) const noexcept {
    return y == Label::Positive ? c_positive() : c_negative;
  }

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;

  static TrainConfig from_costs(double c_positive, double c_negative);

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct TrainDiagnostics {
  double dual_objective = 0.0;
  double slack_sum_pos = 0.0;
  double slack_sum_neg = 0.0;
  double max_violation = 0.0;  // projected-gradient norm after the last pass
  int passes = 0;
  bool converged = false;

  friend bool operator==(const TrainDiagnostics&, const TrainDiagnostics&) = default;
};

class SvmModel {
 public:
  SvmModel() = default;

  /// A bare hyperplane with no training record.
  static SvmModel from_hyperplane(std::vector<double> weights, double bias);

  double decision_value(const SparseVector& x) const noexcept;
  Label predict(const SparseVector& x) const noexcept;

  /// Indexed by feature id; slot 0 is unused.
  std::span<const double> weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  std::span<const double> alphas() const noexcept { return alphas_; }
  std::span<const ExampleId> training_ids() const noexcept { return training_ids_; }
  const TrainDiagnostics& diagnostics() const noexcept { return diagnostics_; }
  const TrainConfig& config() const noexcept { return config_; }

  friend bool operator==(const SvmModel&, const SvmModel&) = default;

 private:
  friend SvmModel train(const Dataset&, std::span<const ExampleId>, const TrainConfig&,
                        std::uint64_t);

  std::vector<double> weights_;
  double bias_ = 0.0;
  std::vector<double> alphas_;
  std::vector<ExampleId> training_ids_;
  TrainDiagnostics diagnostics_;
  TrainConfig config_;
};

/// Sign rule shared by every classifier here: exactly zero goes negative.
constexpr Label label_from_decision(double value) noexcept {
  return value > 0.0 ? Label::Positive : Label::Negative;
}

/// Linear inner product. The solver only needs k(x, x) and the
/// primal update, so this is the one place a kernel would plug in.
struct LinearKernel {
  double operator()(const SparseVector& a, const SparseVector& b) const noexcept {
    return dot(a, b);
  }
};

/// Dual coordinate ascent on
///   max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j (x_i.x_j + 1),  0 <= a_i <= C_{y_i}
/// i.e. the soft-margin problem with the bias folded in as a constant
/// feature. Coordinates are visited in a fresh seeded permutation each pass;
/// the run stops when the largest projected gradient in a pass is within
/// `tolerance`, or after `max_passes`.
///
/// A labeled set holding one class yields the constant classifier of that
/// class (zero weights, bias = +1 or -1).
///
/// Throws std::invalid_argument for an empty labeled set, an unknown id, or a
/// non-finite feature value.
SvmModel train(const Dataset& data, std::span<const ExampleId> labeled, const TrainConfig& config,
               std::uint64_t seed);

inline double decision_value(const SvmModel& m, const SparseVector& x) noexcept {
  return m.decision_value(x);
}
inline Label predict(const SvmModel& m, const SparseVector& x) noexcept { return m.predict(x); }

/// `bias <b>` followed by `w <id> <value>` for every nonzero weight.
void write_model(std::ostream& out, const SvmModel& model);

}  // namespace alsvm
