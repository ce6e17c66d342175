#include "alsvm/prevalence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace alsvm {

void SampleSizeSpec::validate() const {
  if (!(z > 0.0) || !std::isfinite(z)) throw std::invalid_argument("z must be positive");
  if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("sampling error must lie in (0, 1)");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("proportion must lie in [0, 1]");
  if (population < 2) throw std::invalid_argument("population must be at least 2");
}

double uncorrected_sample_size(double z, double p, double e) {
  if (!(z > 0.0)) throw std::invalid_argument("z must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("proportion must lie in [0, 1]");
  if (!(e > 0.0)) throw std::invalid_argument("sampling error must be positive");
  return z * z * p * (1.0 - p) / (e * e);
}

std::uint64_t ceil_sample_size(double raw) {
  if (raw <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::ceil(raw - 1e-9));
}

std::uint64_t corrected_sample_size(const SampleSizeSpec& spec) {
  spec.validate();
  const double n0 = uncorrected_sample_size(spec.z, spec.p, spec.e);
  const auto big_n = static_cast<double>(spec.population);
  const double raw = n0 * big_n / (big_n - 1.0 + n0);
  return std::min(ceil_sample_size(raw), spec.population);
}

double sampling_error(std::uint64_t n, double z, double p, std::uint64_t population) {
  if (n < 1) throw std::invalid_argument("sample size must be at least 1");
  if (n > population) throw std::invalid_argument("sample size exceeds population");
  if (population < 2) throw std::invalid_argument("population must be at least 2");
  const auto nn = static_cast<double>(n);
  const auto big_n = static_cast<double>(population);
  return z * std::sqrt(p * (1.0 - p) / nn) * std::sqrt((big_n - nn) / (big_n - 1.0));
}

PaEstimate estimate_pa(std::size_t positives, std::size_t negatives) {
  if (positives + negatives == 0) throw std::invalid_argument("initial sample is empty");
  PaEstimate est{positives + negatives, positives, negatives, 1.0};
  if (positives > 0 && negatives > 0) {
    est.pa = static_cast<double>(negatives) / static_cast<double>(positives);
  } else {
    est.pa = static_cast<double>(negatives + 1) / static_cast<double>(positives + 1);
  }
  return est;
}

PaEstimate estimate_pa(std::span<const Label> labels) {
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::Positive));
  return estimate_pa(pos, labels.size() - pos);
}

double normal_quantile(double probability) {
  if (!(probability > 0.0 && probability < 1.0)) {
    throw std::invalid_argument("quantile probability must lie in (0, 1)");
  }
  // Acklam's rational approximation.
  constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
  constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
  constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (probability < p_low) {
    const double q = std::sqrt(-2.0 * std::log(probability));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (probability <= 1.0 - p_low) {
    const double q = probability - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - probability));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step against erfc brings the error near machine precision.
  const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - probability;
  const double u = err * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double z_for_confidence(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
  struct Entry {
    double confidence;
    double z;
  };
  constexpr std::array<Entry, 3> table{{{0.90, 1.6449}, {0.95, 1.9600}, {0.99, 2.5758}}};
  for (const auto& e : table) {
    if (std::abs(confidence - e.confidence) < 1e-12) return e.z;
  }
  return normal_quantile(0.5 + confidence / 2.0);
}

}  // namespace alsvm
