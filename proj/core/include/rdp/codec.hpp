#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdp/block.hpp"
#include "rdp/sources.hpp"

namespace rdp {

enum class LossyMethod { random, greedy_cover, type_quantize };

LossyMethod parse_lossy_method(const std::string& name);
const char* to_string(LossyMethod method);

// Two-stage block code over indices {1, ..., 2M}. Blocks whose
// self-information is strictly below log2 M form the high-probability set
// T_n and are coded losslessly by combinatorial ranking into {1, ..., M};
// everything else goes to the nearest codeword of an explicit codebook on
// indices {M+1, ..., 2M}. Immutable after construction.
class TwoStageCodec {
 public:
  std::int64_t n() const { return n_; }
  std::uint64_t m() const { return m_; }
  double log2_m() const { return log2_m_; }
  LossyMethod method() const { return method_; }
  std::uint64_t seed() const { return seed_; }

  // |T_n|; always < M.
  std::uint64_t lossless_size() const { return t_size_; }
  bool is_lossless_class(std::int64_t k) const {
    return lossless_class_[static_cast<std::size_t>(k)];
  }
  const std::vector<Block>& lossy_codebook() const { return codebook_; }

  // Exact Pr[lossy branch] for this codec's own branch rule.
  double epsilon() const { return epsilon_; }

  std::uint64_t encode(const Block& x) const;
  Block decode(std::uint64_t index) const;

 private:
  friend TwoStageCodec build_codec(const SourceModel& model, std::int64_t n,
                                   std::uint64_t m, LossyMethod method,
                                   std::uint64_t seed);

  std::uint64_t rank_in_class(const Block& x) const;
  Block unrank_in_class(std::int64_t k, std::uint64_t r) const;

  std::int64_t n_ = 0;
  std::uint64_t m_ = 0;
  double log2_m_ = 0.0;
  LossyMethod method_ = LossyMethod::random;
  std::uint64_t seed_ = 0;

  std::vector<bool> lossless_class_;          // per ones-count k
  std::vector<std::uint64_t> class_offset_;   // rank offset per lossless k
  std::vector<std::uint64_t> class_count_;    // C(n, k) per k
  std::uint64_t t_size_ = 0;
  double epsilon_ = 0.0;
  std::vector<Block> codebook_;
  std::vector<std::vector<std::uint64_t>> pascal_;
};

// Per-codec evaluation record. Exactness is tracked per field: epsilon is
// always exact, distortion and sigma are exact up to the enumeration cap
// and Monte Carlo / absent beyond it.
struct CodecMetrics {
  double rate = 0.0;  // log2(2M)/n
  double distortion = 0.0;
  double distortion_std_error = 0.0;  // NaN when exact
  bool distortion_exact = false;
  std::optional<double> sigma;  // exact when present
  double epsilon = 0.0;
  std::optional<double> distortion_tail_quantile;
  double tail = 0.0;
  std::int64_t samples_used = 0;
};

// Builds a codec. n is capped at 63 (dense block indexable in one word);
// greedy-cover additionally requires n <= 24 and M <= 2^16 because it
// enumerates all blocks.
TwoStageCodec build_codec(const SourceModel& model, std::int64_t n,
                          std::uint64_t m, LossyMethod method,
                          std::uint64_t seed);

// Exact Pr[x not in T_n] by type-class summation; any n, M given directly
// or as log2 M for budgets beyond 64 bits.
double epsilon_exact(const SourceModel& model, std::int64_t n, std::uint64_t m);
double epsilon_exact_log2m(const SourceModel& model, std::int64_t n, double log2_m);

// Exact variational distance between the reconstruction law and the source
// law by full enumeration. Refuses n > exact_cap: a plug-in sampling
// estimate of sigma is biased, use epsilon as an upper bound instead.
double sigma_exact(const TwoStageCodec& codec, const SourceModel& model,
                   std::int64_t exact_cap = 20);

// Full metrics record. Exhaustive enumeration when n <= exact_cap, seeded
// Monte Carlo for distortion beyond it (sigma then stays absent). Chunked
// substreams make the result independent of the worker count.
CodecMetrics evaluate(const TwoStageCodec& codec, const SourceModel& model,
                      std::int64_t samples, std::uint64_t seed,
                      std::int64_t exact_cap = 20, double tail = 0.01,
                      int workers = 1);

}  // namespace rdp
