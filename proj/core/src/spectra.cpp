#include "rdp/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdp {

StepFunction::StepFunction(std::vector<double> thresholds, std::vector<double> levels)
    : thresholds_(std::move(thresholds)), levels_(std::move(levels)) {
  if (levels_.size() != thresholds_.size() + 1)
    throw std::invalid_argument("StepFunction: need one more level than thresholds");
  for (std::size_t i = 1; i < thresholds_.size(); ++i)
    if (!(thresholds_[i - 1] < thresholds_[i]))
      throw std::invalid_argument("StepFunction: thresholds must be strictly increasing");
  for (std::size_t i = 1; i < levels_.size(); ++i)
    if (!(levels_[i] < levels_[i - 1]))
      throw std::invalid_argument("StepFunction: levels must be strictly decreasing");
  if (levels_.front() > 1.0 || levels_.back() < 0.0)
    throw std::invalid_argument("StepFunction: levels must lie in [0, 1]");
}

double StepFunction::operator()(double r) const {
  const auto it = std::upper_bound(thresholds_.begin(), thresholds_.end(), r);
  return levels_[static_cast<std::size_t>(it - thresholds_.begin())];
}

double binary_entropy(double u) {
  if (!(u >= 0.0 && u <= 1.0))
    throw std::invalid_argument("binary_entropy: u must be in [0, 1]");
  if (u == 0.0 || u == 1.0) return 0.0;
  return -u * std::log2(u) - (1.0 - u) * std::log2(1.0 - u);
}

double binary_entropy_inv(double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("binary_entropy_inv: t must be in [0, 1]");
  if (t == 0.0) return 0.0;
  if (t == 1.0) return 0.5;
  double lo = 0.0, hi = 0.5;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (binary_entropy(mid) < t ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double exceedance_mass_bits(const TypeClassTable& table, double threshold_bits) {
  double sum = 0.0, carry = 0.0;
  for (const auto& row : table.rows) {
    const double self_info = -row.log2_atom_prob;
    if (!(self_info >= threshold_bits)) continue;
    const double mass = std::exp2(row.log2_count + row.log2_atom_prob);
    const double y = mass - carry;
    const double s = sum + y;
    carry = (s - sum) - y;
    sum = s;
  }
  return std::min(sum, 1.0);
}

double spectral_cdf_exact(const TypeClassTable& table, double r) {
  return exceedance_mass_bits(table, static_cast<double>(table.n) * r);
}

double spectral_cdf_exact(const SourceModel& model, std::int64_t n, double r) {
  return spectral_cdf_exact(build_type_table(model, n), r);
}

ExceedanceCurve compute_exceedance(const SourceModel& model, std::int64_t n,
                                   const std::vector<double>& r_values) {
  const TypeClassTable table = build_type_table(model, n);
  ExceedanceCurve curve;
  curve.n = n;
  curve.exact = true;
  curve.points.reserve(r_values.size());
  for (double r : r_values) curve.points.emplace_back(r, spectral_cdf_exact(table, r));
  return curve;
}

StepFunction asymptotic_spectral_cdf(const SourceModel& model) {
  // Group components whose entropies coincide within 1e-12.
  std::vector<std::pair<double, double>> entropy_weight;  // (h(p_j), weight)
  for (const auto& c : model.components())
    entropy_weight.emplace_back(binary_entropy(c.p), c.weight);
  std::sort(entropy_weight.begin(), entropy_weight.end());

  std::vector<double> thresholds;
  std::vector<double> drops;
  for (const auto& [h, w] : entropy_weight) {
    if (!thresholds.empty() && h - thresholds.back() <= 1e-12) {
      drops.back() += w;
    } else {
      thresholds.push_back(h);
      drops.push_back(w);
    }
  }

  std::vector<double> levels;
  levels.push_back(1.0);
  for (double d : drops) levels.push_back(levels.back() - d);
  levels.back() = 0.0;  // exact zero instead of 1 - sum(w) roundoff
  return StepFunction(std::move(thresholds), std::move(levels));
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("empirical_quantile: empty sample set");
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("empirical_quantile: q must be in (0, 1)");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil(pos));
  if (rank < 1) rank = 1;
  if (rank > values.size()) rank = values.size();
  return values[rank - 1];
}

double plimsup_estimate(
    const std::vector<std::pair<std::int64_t, std::vector<double>>>& samples,
    double tail) {
  if (!(tail > 0.0 && tail < 0.5))
    throw std::invalid_argument("plimsup_estimate: tail must be in (0, 0.5)");
  const std::vector<double>* chosen = nullptr;
  std::int64_t chosen_n = 0;
  for (const auto& [n, values] : samples) {
    if (values.size() < 100) continue;
    if (chosen == nullptr || n > chosen_n) {
      chosen = &values;
      chosen_n = n;
    }
  }
  if (chosen == nullptr)
    throw std::invalid_argument("plimsup_estimate: need at least one n with >= 100 samples");
  return empirical_quantile(*chosen, 1.0 - tail);
}

}  // namespace rdp
