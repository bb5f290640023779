#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rdp/block.hpp"
#include "rdp/rng.hpp"

namespace rdp {

// One memoryless binary component of a mixture: weight and P(symbol = 1).
struct MixtureComponent {
  double weight;
  double p;
};

// Weighted finite mixture of Bernoulli(p_j) product sources. The block
// length n is supplied per call, never stored. Every block probability
// depends only on the ones-count, which is what makes exact computation at
// large n possible.
class SourceModel {
 public:
  explicit SourceModel(std::vector<MixtureComponent> components);

  static SourceModel bernoulli(double p);
  // The canonical two-component source: equal mixture of Bernoulli(1/2)
  // and Bernoulli(3/4).
  static SourceModel paper_mixed();

  // Accepted forms: "bernoulli:p", "mix:w1*p1,w2*p2,...", "paper-mixed".
  static SourceModel parse(const std::string& spec);

  const std::vector<MixtureComponent>& components() const { return components_; }

  bool is_paper_mixed(double tol = 1e-12) const;

  std::string to_spec_string() const;

 private:
  std::vector<MixtureComponent> components_;
};

struct TypeClassRow {
  std::int64_t k = 0;
  std::uint64_t exact_count = 0;  // valid iff count_is_exact
  bool count_is_exact = false;
  double log2_count = 0.0;
  double log2_atom_prob = 0.0;  // log2 P(any single block with k ones)
};

// Exact per-ones-count table for one (model, n) pair.
struct TypeClassTable {
  std::int64_t n = 0;
  std::vector<TypeClassRow> rows;  // indexed by k = 0..n
  double total_mass = 0.0;         // sum of count * atom over all rows; ~1
};

// log2 Pr[X^n = x] for any block x with k ones, via log-sum-exp over the
// mixture components.
double block_log_prob(const SourceModel& model, std::int64_t k, std::int64_t n);

TypeClassTable build_type_table(const SourceModel& model, std::int64_t n);

// Draws the latent component by weight, then n iid bits. The component
// index is returned for diagnostics only.
std::pair<Block, std::size_t> sample_block(const SourceModel& model,
                                           std::int64_t n, Rng& rng);

// Total probability of the M most probable blocks: whole type classes in
// descending per-atom probability, then a partial class.
double top_mass(const SourceModel& model, std::int64_t n, std::uint64_t m);
double top_mass(const TypeClassTable& table, std::uint64_t m);

}  // namespace rdp
