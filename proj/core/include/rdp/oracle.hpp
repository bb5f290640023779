#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rdp/block.hpp"
#include "rdp/sources.hpp"

namespace rdp {

// A concrete deterministic codec: reconstruction values plus the full
// encoder map (one codebook index per source block, blocks ordered by
// their integer value).
struct CodecWitness {
  std::vector<Block> codebook;
  std::vector<std::uint8_t> encoder_map;

  std::string to_line() const;  // "bits bits ...|hexdigits"
};

struct FrontierPoint {
  std::uint64_t m = 0;
  double distortion = 0.0;
  double sigma = 0.0;
  CodecWitness witness;
  bool exhaustive = true;
};

// Exact (distortion, sigma) of a witness under the model.
std::pair<double, double> evaluate_witness(const SourceModel& model,
                                           std::int64_t n,
                                           const CodecWitness& witness);

// Exact Pareto frontier over all deterministic codecs with at most M
// reconstruction values. Exhaustive for n <= 3; n = 4 only with the
// heuristic flag (scalarized local search, flagged non-exhaustive).
std::vector<FrontierPoint> enumerate_frontier(const SourceModel& model,
                                              std::int64_t n, std::uint64_t m,
                                              bool heuristic = false,
                                              std::uint64_t seed = 0,
                                              int workers = 1);

// Exact minimum sigma over all codecs with <= M reconstruction values:
// 1 - top_mass(model, n, M), achieved by fixing the top-M blocks and
// mapping everything else into that set.
double min_sigma_closed_form(const SourceModel& model, std::int64_t n,
                             std::uint64_t m);

}  // namespace rdp
