#include "rdp/codec.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cassert>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <thread>

#include "rdp/binomial.hpp"
#include "rdp/rng.hpp"
#include "rdp/spectra.hpp"

namespace rdp {

namespace {

constexpr std::int64_t kMaxDenseN = 63;
constexpr std::int64_t kMaxEnumN = 24;
constexpr std::uint64_t kMaxRandomCodebook = 1ull << 20;
constexpr std::int64_t kChunkSize = 4096;

std::vector<double> atom_probs(const TypeClassTable& table) {
  std::vector<double> probs(table.rows.size());
  for (std::size_t k = 0; k < probs.size(); ++k)
    probs[k] = std::exp2(table.rows[k].log2_atom_prob);
  return probs;
}

std::vector<Block> make_random_codebook(const SourceModel& model, std::int64_t n,
                                        std::uint64_t m, std::uint64_t seed) {
  if (m > kMaxRandomCodebook)
    throw std::invalid_argument(
        "build_codec: random codebook budget exceeds 2^20 codewords; "
        "use type-quantize for larger budgets");
  std::size_t dominant = 0;
  for (std::size_t j = 1; j < model.components().size(); ++j)
    if (model.components()[j].weight > model.components()[dominant].weight) dominant = j;
  const double p = model.components()[dominant].p;
  Rng rng = Rng::substream(seed, 0);
  std::vector<Block> codebook;
  codebook.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    Block b(n);
    for (std::int64_t pos = 0; pos < n; ++pos)
      if (rng.bernoulli(p)) b.set_bit(pos, true);
    codebook.push_back(std::move(b));
  }
  return codebook;
}

// Greedy mass-weighted covering: each step adds the block that removes the
// most probability-weighted Hamming distance to the chosen set; ties go to
// the lowest block value, so codebooks are nested across M.
//
// The first pick is analytic (bit marginals are exchangeable, so expected
// distance is linear in the candidate's ones-count). Later picks use lazy
// greedy: gains only shrink as the codebook grows, so a stale gain is an
// upper bound and the heap order (gain desc, value asc) reproduces the
// plain scan exactly, including ties.
std::vector<Block> make_greedy_cover_codebook(const SourceModel& model,
                                              const TypeClassTable& table,
                                              std::int64_t n, std::uint64_t m) {
  if (n > kMaxEnumN || m > (1ull << 16))
    throw std::invalid_argument(
        "build_codec: greedy-cover requires n <= 24 and M <= 2^16");
  const std::int64_t block_count = std::int64_t{1} << n;
  const std::vector<double> atom = atom_probs(table);
  std::vector<double> prob(static_cast<std::size_t>(block_count));
  for (std::int64_t v = 0; v < block_count; ++v)
    prob[static_cast<std::size_t>(v)] =
        atom[static_cast<std::size_t>(std::popcount(static_cast<std::uint64_t>(v)))];

  double mean_p = 0.0;
  for (const auto& c : model.components()) mean_p += c.weight * c.p;
  const std::int64_t first =
      mean_p > 0.5 ? block_count - 1 : 0;  // all-ones vs all-zeros

  std::vector<std::uint8_t> dist(static_cast<std::size_t>(block_count));
  for (std::int64_t v = 0; v < block_count; ++v)
    dist[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(
        std::popcount(static_cast<std::uint64_t>(v ^ first)));
  std::vector<Block> codebook;
  codebook.push_back(Block::from_bits(n, static_cast<std::uint64_t>(first)));

  auto gain_of = [&](std::int64_t c) {
    double gain = 0.0;
    for (std::int64_t v = 0; v < block_count; ++v) {
      const int d = std::popcount(static_cast<std::uint64_t>(v ^ c));
      const int cur = dist[static_cast<std::size_t>(v)];
      if (d < cur) gain += prob[static_cast<std::size_t>(v)] * (cur - d);
    }
    return gain;
  };

  struct Entry {
    double gain;
    std::int64_t value;
    std::size_t round;
  };
  const auto later = [](const Entry& a, const Entry& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.value > b.value;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> heap(later);
  if (m > 1)
    for (std::int64_t c = 0; c < block_count; ++c)
      heap.push({gain_of(c), c, codebook.size()});

  while (codebook.size() < m && !heap.empty()) {
    Entry top = heap.top();
    heap.pop();
    if (top.round != codebook.size()) {
      top.gain = gain_of(top.value);
      top.round = codebook.size();
      heap.push(top);
      continue;
    }
    if (!(top.gain > 0.0)) break;  // everything already at distance 0
    for (std::int64_t v = 0; v < block_count; ++v) {
      const int d = std::popcount(static_cast<std::uint64_t>(v ^ top.value));
      if (d < dist[static_cast<std::size_t>(v)])
        dist[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(d);
    }
    codebook.push_back(Block::from_bits(n, static_cast<std::uint64_t>(top.value)));
  }
  return codebook;
}

Block balanced_block(std::int64_t n, std::int64_t k) {
  Block b(n);
  for (std::int64_t j = 0; j < k; ++j)
    b.set_bit(((2 * j + 1) * n) / (2 * k), true);
  return b;
}

std::vector<Block> make_type_quantize_codebook(const SourceModel& model,
                                               std::int64_t n, std::uint64_t m) {
  const std::int64_t levels =
      m < static_cast<std::uint64_t>(n + 1) ? static_cast<std::int64_t>(m) : n + 1;
  std::vector<std::int64_t> ks;
  if (levels == 1) {
    double mean_p = 0.0;
    for (const auto& c : model.components()) mean_p += c.weight * c.p;
    ks.push_back(std::llround(mean_p * static_cast<double>(n)));
  } else {
    for (std::int64_t i = 0; i < levels; ++i) ks.push_back((i * n) / (levels - 1));
  }
  std::vector<Block> codebook;
  codebook.reserve(ks.size());
  for (std::int64_t k : ks) codebook.push_back(balanced_block(n, k));
  return codebook;
}

}  // namespace

LossyMethod parse_lossy_method(const std::string& name) {
  if (name == "random") return LossyMethod::random;
  if (name == "greedy-cover") return LossyMethod::greedy_cover;
  if (name == "type-quantize") return LossyMethod::type_quantize;
  throw std::invalid_argument("unknown lossy method '" + name +
                              "' (expected random, greedy-cover or type-quantize)");
}

const char* to_string(LossyMethod method) {
  switch (method) {
    case LossyMethod::random: return "random";
    case LossyMethod::greedy_cover: return "greedy-cover";
    case LossyMethod::type_quantize: return "type-quantize";
  }
  return "?";
}

TwoStageCodec build_codec(const SourceModel& model, std::int64_t n,
                          std::uint64_t m, LossyMethod method,
                          std::uint64_t seed) {
  if (n < 1 || n > kMaxDenseN)
    throw std::invalid_argument("build_codec: n must be in [1, 63]");
  if (m < 1 || m > (1ull << 62))
    throw std::invalid_argument("build_codec: M must be in [1, 2^62]");

  TwoStageCodec codec;
  codec.n_ = n;
  codec.m_ = m;
  codec.log2_m_ = std::log2(static_cast<double>(m));
  codec.method_ = method;
  codec.seed_ = seed;
  codec.pascal_ = pascal_rows(n);

  const TypeClassTable table = build_type_table(model, n);
  codec.lossless_class_.assign(static_cast<std::size_t>(n) + 1, false);
  codec.class_offset_.assign(static_cast<std::size_t>(n) + 1, 0);
  codec.class_count_.assign(static_cast<std::size_t>(n) + 1, 0);
  std::uint64_t offset = 0;
  for (std::int64_t k = 0; k <= n; ++k) {
    const auto& row = table.rows[static_cast<std::size_t>(k)];
    codec.class_count_[static_cast<std::size_t>(k)] = row.exact_count;
    const bool lossy = -row.log2_atom_prob >= codec.log2_m_;
    if (lossy) continue;
    codec.lossless_class_[static_cast<std::size_t>(k)] = true;
    codec.class_offset_[static_cast<std::size_t>(k)] = offset;
    offset += row.exact_count;
  }
  codec.t_size_ = offset;
  // Each member of T_n has probability > 1/M, so |T_n| < M.
  assert(codec.t_size_ < m);
  codec.epsilon_ = exceedance_mass_bits(table, codec.log2_m_);

  switch (method) {
    case LossyMethod::random:
      codec.codebook_ = make_random_codebook(model, n, m, seed);
      break;
    case LossyMethod::greedy_cover:
      codec.codebook_ = make_greedy_cover_codebook(model, table, n, m);
      break;
    case LossyMethod::type_quantize:
      codec.codebook_ = make_type_quantize_codebook(model, n, m);
      break;
  }
  assert(!codec.codebook_.empty());
  assert(codec.codebook_.size() <= m);
  return codec;
}

std::uint64_t TwoStageCodec::rank_in_class(const Block& x) const {
  std::uint64_t rank = 0;
  std::int64_t remaining_ones = x.ones_count();
  for (std::int64_t i = 0; i < n_ && remaining_ones > 0; ++i) {
    if (!x.bit(i)) continue;
    const std::int64_t slots = n_ - 1 - i;
    if (remaining_ones <= slots)
      rank += pascal_[static_cast<std::size_t>(slots)][static_cast<std::size_t>(remaining_ones)];
    --remaining_ones;
  }
  return rank;
}

Block TwoStageCodec::unrank_in_class(std::int64_t k, std::uint64_t r) const {
  Block b(n_);
  std::int64_t remaining_ones = k;
  for (std::int64_t i = 0; i < n_ && remaining_ones > 0; ++i) {
    const std::int64_t slots = n_ - 1 - i;
    const std::uint64_t with_zero_here =
        remaining_ones <= slots
            ? pascal_[static_cast<std::size_t>(slots)][static_cast<std::size_t>(remaining_ones)]
            : 0;
    if (r >= with_zero_here) {
      b.set_bit(i, true);
      r -= with_zero_here;
      --remaining_ones;
    }
  }
  assert(r == 0);
  return b;
}

std::uint64_t TwoStageCodec::encode(const Block& x) const {
  if (x.length() != n_) throw std::invalid_argument("encode: block length mismatch");
  const std::int64_t k = x.ones_count();
  if (lossless_class_[static_cast<std::size_t>(k)])
    return 1 + class_offset_[static_cast<std::size_t>(k)] + rank_in_class(x);

  std::int64_t best_distance = std::numeric_limits<std::int64_t>::max();
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < codebook_.size(); ++i) {
    const std::int64_t d = x.hamming_distance(codebook_[i]);
    if (d < best_distance) {  // ties keep the lowest codebook index
      best_distance = d;
      best_index = i;
    }
  }
  return m_ + 1 + best_index;
}

Block TwoStageCodec::decode(std::uint64_t index) const {
  if (index < 1 || index > 2 * m_)
    throw std::out_of_range("decode: index outside {1, ..., 2M}");
  if (index <= m_) {
    const std::uint64_t r = index - 1;
    if (r >= t_size_)
      throw std::out_of_range("decode: unassigned lossless index");
    for (std::int64_t k = 0; k <= n_; ++k) {
      if (!lossless_class_[static_cast<std::size_t>(k)]) continue;
      const std::uint64_t start = class_offset_[static_cast<std::size_t>(k)];
      if (r >= start && r < start + class_count_[static_cast<std::size_t>(k)])
        return unrank_in_class(k, r - start);
    }
    throw std::out_of_range("decode: unassigned lossless index");
  }
  const std::uint64_t j = index - m_ - 1;
  if (j >= codebook_.size())
    throw std::out_of_range("decode: unassigned lossy index");
  return codebook_[static_cast<std::size_t>(j)];
}

double epsilon_exact_log2m(const SourceModel& model, std::int64_t n, double log2_m) {
  if (n < 1) throw std::invalid_argument("epsilon_exact: n must be >= 1");
  return exceedance_mass_bits(build_type_table(model, n), log2_m);
}

double epsilon_exact(const SourceModel& model, std::int64_t n, std::uint64_t m) {
  if (m < 1) throw std::invalid_argument("epsilon_exact: M must be >= 1");
  return epsilon_exact_log2m(model, n, std::log2(static_cast<double>(m)));
}

namespace {

// Shared exhaustive pass: pushforward mass and distortion moments.
struct ExactEvaluation {
  double distortion = 0.0;  // per symbol
  double sigma = 0.0;
  std::vector<double> distance_mass;  // indexed by block Hamming distance
};

ExactEvaluation enumerate_exact(const TwoStageCodec& codec, const SourceModel& model) {
  const std::int64_t n = codec.n();
  const std::int64_t block_count = std::int64_t{1} << n;
  const std::vector<double> atom = atom_probs(build_type_table(model, n));

  std::vector<double> source_mass(static_cast<std::size_t>(block_count));
  std::vector<double> recon_mass(static_cast<std::size_t>(block_count), 0.0);
  ExactEvaluation out;
  out.distance_mass.assign(static_cast<std::size_t>(n) + 1, 0.0);

  for (std::int64_t v = 0; v < block_count; ++v) {
    const Block x = Block::from_bits(n, static_cast<std::uint64_t>(v));
    const double p = atom[static_cast<std::size_t>(x.ones_count())];
    source_mass[static_cast<std::size_t>(v)] = p;
    const Block y = codec.decode(codec.encode(x));
    const std::int64_t d = x.hamming_distance(y);
    recon_mass[static_cast<std::size_t>(y.as_uint64())] += p;
    out.distance_mass[static_cast<std::size_t>(d)] += p;
    out.distortion += p * static_cast<double>(d) / static_cast<double>(n);
  }
  for (std::int64_t v = 0; v < block_count; ++v) {
    const double excess = recon_mass[static_cast<std::size_t>(v)] -
                          source_mass[static_cast<std::size_t>(v)];
    if (excess > 0.0) out.sigma += excess;
  }
  return out;
}

}  // namespace

double sigma_exact(const TwoStageCodec& codec, const SourceModel& model,
                   std::int64_t exact_cap) {
  if (exact_cap > kMaxEnumN)
    throw std::invalid_argument("sigma_exact: exact_cap above 24 is not supported");
  if (codec.n() > exact_cap)
    throw std::invalid_argument(
        "sigma_exact: n exceeds the exact enumeration cap; a sampled sigma "
        "estimate would be biased -- use the exact epsilon as an upper bound");
  return enumerate_exact(codec, model).sigma;
}

CodecMetrics evaluate(const TwoStageCodec& codec, const SourceModel& model,
                      std::int64_t samples, std::uint64_t seed,
                      std::int64_t exact_cap, double tail, int workers) {
  if (exact_cap > kMaxEnumN)
    throw std::invalid_argument("evaluate: exact_cap above 24 is not supported");
  if (!(tail > 0.0 && tail < 0.5))
    throw std::invalid_argument("evaluate: tail must be in (0, 0.5)");

  const std::int64_t n = codec.n();
  CodecMetrics metrics;
  metrics.rate = (1.0 + codec.log2_m()) / static_cast<double>(n);
  metrics.epsilon = codec.epsilon();
  metrics.tail = tail;

  if (n <= exact_cap) {
    const ExactEvaluation exact = enumerate_exact(codec, model);
    metrics.distortion = exact.distortion;
    metrics.distortion_std_error = std::numeric_limits<double>::quiet_NaN();
    metrics.distortion_exact = true;
    metrics.sigma = exact.sigma;
    metrics.samples_used = 0;
    // Exact (1 - tail)-quantile of per-block distortion.
    double cumulative = 0.0;
    for (std::size_t d = 0; d < exact.distance_mass.size(); ++d) {
      cumulative += exact.distance_mass[d];
      if (cumulative >= 1.0 - tail) {
        metrics.distortion_tail_quantile =
            static_cast<double>(d) / static_cast<double>(n);
        break;
      }
    }
    if (!metrics.distortion_tail_quantile) metrics.distortion_tail_quantile = 1.0;
    return metrics;
  }

  if (samples < 1)
    throw std::invalid_argument("evaluate: Monte Carlo mode needs samples >= 1");
  if (workers < 1) workers = 1;

  struct ChunkResult {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::vector<double> values;
  };
  const std::int64_t num_chunks = (samples + kChunkSize - 1) / kChunkSize;
  std::vector<ChunkResult> chunks(static_cast<std::size_t>(num_chunks));
  std::atomic<std::int64_t> next_chunk{0};

  auto run_chunks = [&]() {
    for (;;) {
      const std::int64_t c = next_chunk.fetch_add(1);
      if (c >= num_chunks) return;
      const std::int64_t begin = c * kChunkSize;
      const std::int64_t end = std::min(samples, begin + kChunkSize);
      Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(1 + c));
      auto& result = chunks[static_cast<std::size_t>(c)];
      result.values.reserve(static_cast<std::size_t>(end - begin));
      for (std::int64_t i = begin; i < end; ++i) {
        const Block x = sample_block(model, n, rng).first;
        const Block y = codec.decode(codec.encode(x));
        const double d =
            static_cast<double>(x.hamming_distance(y)) / static_cast<double>(n);
        result.sum += d;
        result.sum_sq += d * d;
        result.values.push_back(d);
      }
    }
  };

  const int thread_count = static_cast<int>(
      std::min<std::int64_t>(workers, num_chunks));
  if (thread_count <= 1) {
    run_chunks();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(run_chunks);
    for (auto& t : pool) t.join();
  }

  // Merge in chunk order so the result ignores the thread schedule.
  double total = 0.0, total_sq = 0.0;
  std::vector<double> all_values;
  all_values.reserve(static_cast<std::size_t>(samples));
  for (const auto& chunk : chunks) {
    total += chunk.sum;
    total_sq += chunk.sum_sq;
    all_values.insert(all_values.end(), chunk.values.begin(), chunk.values.end());
  }

  const double mean = total / static_cast<double>(samples);
  metrics.distortion = mean;
  metrics.distortion_exact = false;
  metrics.samples_used = samples;
  if (samples >= 2) {
    const double var = std::max(
        0.0, (total_sq - static_cast<double>(samples) * mean * mean) /
                 static_cast<double>(samples - 1));
    metrics.distortion_std_error = std::sqrt(var / static_cast<double>(samples));
  } else {
    metrics.distortion_std_error = std::numeric_limits<double>::quiet_NaN();
  }
  if (samples >= 100)
    metrics.distortion_tail_quantile =
        plimsup_estimate({{n, std::move(all_values)}}, tail);
  return metrics;
}

}  // namespace rdp
