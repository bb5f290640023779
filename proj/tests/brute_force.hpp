#pragma once

// Test-only oracles, computed from first principles: per-block probabilities
// as plain products over bit positions, sums as full 2^n enumerations. These
// deliberately avoid the type-class and log-domain machinery they check.

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rdp/sources.hpp"

namespace brute {

inline double block_prob(const rdp::SourceModel& model, std::int64_t n,
                         std::uint64_t bits) {
  double total = 0.0;
  for (const auto& c : model.components()) {
    double prod = c.weight;
    for (std::int64_t i = 0; i < n; ++i)
      prod *= ((bits >> i) & 1u) ? c.p : (1.0 - c.p);
    total += prod;
  }
  return total;
}

inline double total_mass(const rdp::SourceModel& model, std::int64_t n) {
  double sum = 0.0;
  for (std::uint64_t v = 0; v < (1ull << n); ++v) sum += block_prob(model, n, v);
  return sum;
}

inline double exceedance(const rdp::SourceModel& model, std::int64_t n, double r) {
  double sum = 0.0;
  for (std::uint64_t v = 0; v < (1ull << n); ++v) {
    const double p = block_prob(model, n, v);
    if (p <= 0.0) continue;
    if (-std::log2(p) >= static_cast<double>(n) * r) sum += p;
  }
  return sum;
}

// Exact top-M mass by sorting all block probabilities.
inline double top_mass(const rdp::SourceModel& model, std::int64_t n,
                       std::uint64_t m) {
  std::vector<double> probs;
  probs.reserve(1ull << n);
  for (std::uint64_t v = 0; v < (1ull << n); ++v)
    probs.push_back(block_prob(model, n, v));
  std::sort(probs.begin(), probs.end(), std::greater<double>());
  double sum = 0.0;
  for (std::uint64_t i = 0; i < probs.size() && i < m; ++i) sum += probs[i];
  return sum;
}

// Exact sigma of an arbitrary block map under the model.
template <typename MapFn>
double sigma_of_map(const rdp::SourceModel& model, std::int64_t n, MapFn&& map) {
  const std::uint64_t count = 1ull << n;
  std::vector<double> source(count), recon(count, 0.0);
  for (std::uint64_t v = 0; v < count; ++v) {
    source[v] = block_prob(model, n, v);
    recon[map(v)] += source[v];
  }
  double sigma = 0.0;
  for (std::uint64_t v = 0; v < count; ++v)
    if (recon[v] > source[v]) sigma += recon[v] - source[v];
  return sigma;
}

// Exact expected per-symbol distortion of an arbitrary block map.
template <typename MapFn>
double distortion_of_map(const rdp::SourceModel& model, std::int64_t n, MapFn&& map) {
  double total = 0.0;
  for (std::uint64_t v = 0; v < (1ull << n); ++v)
    total += block_prob(model, n, v) *
             static_cast<double>(std::popcount(v ^ map(v))) / static_cast<double>(n);
  return total;
}

}  // namespace brute
