#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "alsvm/dataset.hpp"

namespace alsvm {

/// Inputs for sizing a random sample that estimates a class proportion.
struct SampleSizeSpec {
  double z = 1.96;  // standard-normal score for the confidence level
  double e = 0.05;  // acceptable |p_S - p|
  double p = 0.5;   // planning value of the population proportion
  std::uint64_t population = 0;

  void validate() const;
};

/// n0 = z^2 p (1 - p) / e^2, the infinite-population sample size.
double uncorrected_sample_size(double z, double p, double e);

/// Finite-population corrected size n0 N / (N - 1 + n0), rounded up and
/// capped at N.
std::uint64_t corrected_sample_size(const SampleSizeSpec& spec);

/// Ceiling with a 1e-9 allowance so values like 100.0000000001 produced by
/// floating-point noise do not round up to 101.
std::uint64_t ceil_sample_size(double raw);

/// e = z sqrt(p (1 - p) / n) sqrt((N - n) / (N - 1)).
double sampling_error(std::uint64_t n, double z, double p, std::uint64_t population);

struct PaEstimate {
  std::size_t sample_size = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double pa = 1.0;

  double sample_proportion() const noexcept {
    return sample_size == 0 ? 0.0 : static_cast<double>(positives) / static_cast<double>(sample_size);
  }
};

/// negatives / positives when both classes occur; add-one smoothing on both
/// counts otherwise.
PaEstimate estimate_pa(std::size_t positives, std::size_t negatives);
PaEstimate estimate_pa(std::span<const Label> labels);

/// Normal approximation rule of thumb: at least 5 of each class.
constexpr bool check_normal_approx(std::size_t positives, std::size_t negatives) noexcept {
  return positives >= 5 && negatives >= 5;
}

/// Lower-tail standard normal quantile (rational approximation, ~1e-9 relative).
double normal_quantile(double probability);

/// Two-sided z for a confidence level. 0.90, 0.95 and 0.99 use the usual
/// table values 1.6449, 1.9600 and 2.5758.
double z_for_confidence(double confidence);

}  // namespace alsvm
