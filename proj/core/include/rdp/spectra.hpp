#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rdp/sources.hpp"

namespace rdp {

// Nonincreasing piecewise-constant function of rate. levels has one more
// entry than thresholds; levels[i] applies on [thresholds[i-1], thresholds[i]),
// so a threshold carries the new (lower) level at the threshold itself.
class StepFunction {
 public:
  StepFunction(std::vector<double> thresholds, std::vector<double> levels);

  double operator()(double r) const;

  const std::vector<double>& thresholds() const { return thresholds_; }
  const std::vector<double>& levels() const { return levels_; }

 private:
  std::vector<double> thresholds_;
  std::vector<double> levels_;
};

// Finite-n exceedance curve: points (R, Pr[(1/n)(-log2 P(X^n)) >= R]).
struct ExceedanceCurve {
  std::int64_t n = 0;
  std::vector<std::pair<double, double>> points;
  bool exact = true;
};

// Binary entropy in bits, h(0) = h(1) = 0.
double binary_entropy(double u);

// Unique d in [0, 1/2] with h(d) = t, bisected to 1e-12.
double binary_entropy_inv(double t);

// Total probability of blocks whose self-information -log2 P(x) is >= the
// given threshold in bits. The weak inequality is deliberate.
double exceedance_mass_bits(const TypeClassTable& table, double threshold_bits);

// Exact Pr[(1/n)(-log2 P(X^n)) >= R] by type-class summation. The
// inequality is weak, so a uniform source at R = 1 gives exactly 1.
double spectral_cdf_exact(const SourceModel& model, std::int64_t n, double r);
double spectral_cdf_exact(const TypeClassTable& table, double r);

ExceedanceCurve compute_exceedance(const SourceModel& model, std::int64_t n,
                                   const std::vector<double>& r_values);

// Limiting step function of the exceedance curve: a component of entropy
// h(p_j) stops counting once R reaches h(p_j).
StepFunction asymptotic_spectral_cdf(const SourceModel& model);

// Empirical (1 - tail)-quantile at the largest block length that has at
// least 100 samples. A diagnostic stand-in for the limit in probability,
// not a convergent estimator of it.
double plimsup_estimate(
    const std::vector<std::pair<std::int64_t, std::vector<double>>>& samples,
    double tail);

// Empirical (1 - tail)-quantile of one sample set (inverted-CDF convention).
double empirical_quantile(std::vector<double> values, double q);

}  // namespace rdp
