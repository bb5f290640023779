#include "rdp/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdp {

double rd_term(const SourceModel& model, double distortion) {
  if (!(distortion >= 0.0)) throw std::invalid_argument("rd_term: D must be >= 0");
  const double hd = binary_entropy(std::min(distortion, 0.5));
  double best = 0.0;
  for (const auto& c : model.components())
    best = std::max(best, binary_entropy(c.p) - hd);
  return best;
}

double perception_term(const SourceModel& model, double perception) {
  if (!(perception >= 0.0 && perception <= 1.0))
    throw std::invalid_argument("perception_term: S must be in [0, 1]");
  const StepFunction f = asymptotic_spectral_cdf(model);
  const auto& levels = f.levels();
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i] <= perception) return i == 0 ? 0.0 : f.thresholds()[i - 1];
  return f.thresholds().back();  // unreachable: the last level is 0
}

RdpBreakdown rdp_theorem(const SourceModel& model, double distortion, double perception) {
  RdpBreakdown out;
  out.rd_term = rd_term(model, distortion);
  out.perception_term = perception_term(model, perception);
  out.value = std::max(out.rd_term, out.perception_term);
  if (out.rd_term == out.perception_term)
    out.binding = RdpBinding::both;
  else
    out.binding = out.rd_term > out.perception_term ? RdpBinding::rate_distortion
                                                    : RdpBinding::perception;
  return out;
}

double rdp_paper_example(double distortion, double perception) {
  if (!(distortion >= 0.0 && distortion <= 0.5))
    throw std::invalid_argument("rdp_paper_example: D must be in [0, 0.5]");
  if (!(perception >= 0.0 && perception <= 1.0))
    throw std::invalid_argument("rdp_paper_example: S must be in [0, 1]");
  if (perception == 0.0) return 1.0;
  const double lossy = 1.0 - binary_entropy(distortion);
  if (perception <= 0.5) return std::max(binary_entropy(0.25), lossy);
  return lossy;
}

std::vector<DiscrepancyRow> discrepancy_report(std::span<const double> d_grid,
                                               std::span<const double> s_grid) {
  const SourceModel model = SourceModel::paper_mixed();
  std::vector<DiscrepancyRow> rows;
  for (double d : d_grid) {
    for (double s : s_grid) {
      const double theorem_value = rdp_theorem(model, d, s).value;
      const double paper_value = rdp_paper_example(d, s);
      const double difference = std::abs(theorem_value - paper_value);
      if (difference > 1e-9)
        rows.push_back({d, s, theorem_value, paper_value, difference});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const DiscrepancyRow& a, const DiscrepancyRow& b) {
    if (a.difference != b.difference) return a.difference > b.difference;
    if (a.distortion != b.distortion) return a.distortion < b.distortion;
    return a.perception < b.perception;
  });
  return rows;
}

}  // namespace rdp
