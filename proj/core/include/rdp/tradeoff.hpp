#pragma once

#include <span>
#include <vector>

#include "rdp/sources.hpp"
#include "rdp/spectra.hpp"

namespace rdp {

// A candidate operating point: code rate, per-symbol Hamming distortion
// budget, and variational-distance (perception) budget.
struct TradeoffPoint {
  double rate;
  double distortion;
  double perception;

  bool is_valid() const {
    return rate >= 0.0 && distortion >= 0.0 && perception >= 0.0 && perception <= 1.0;
  }
};

enum class RdpBinding { rate_distortion, perception, both };

// max-of-two-terms evaluation with both terms exposed.
struct RdpBreakdown {
  double rd_term;
  double perception_term;
  double value;
  RdpBinding binding;
};

// Rate-distortion term: largest component entropy minus h(D), clamped at 0.
// Zero for D >= 1/2.
double rd_term(const SourceModel& model, double distortion);

// Smallest rate at which the asymptotic exceedance step function is <= S.
double perception_term(const SourceModel& model, double perception);

RdpBreakdown rdp_theorem(const SourceModel& model, double distortion, double perception);

// Piecewise closed form for the canonical mixed source, boundaries exactly
// as printed: 1 at S = 0; max{h(1/4), 1-h(D)} for 0 < S <= 1/2; 1-h(D) for
// S > 1/2. Domain: D in [0, 1/2], S in [0, 1].
double rdp_paper_example(double distortion, double perception);

struct DiscrepancyRow {
  double distortion;
  double perception;
  double theorem_value;
  double paper_value;
  double difference;
};

// Grid points (canonical source) where the general evaluator and the
// piecewise closed form differ by more than 1e-9, largest difference first.
// Both evaluators are reported verbatim; neither is adjusted to the other.
std::vector<DiscrepancyRow> discrepancy_report(std::span<const double> d_grid,
                                               std::span<const double> s_grid);

}  // namespace rdp
