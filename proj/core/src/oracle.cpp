#include "rdp/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "rdp/rng.hpp"

namespace rdp {

namespace {

constexpr double kTol = 1e-12;

struct Candidate {
  double distortion;
  double sigma;
  std::vector<std::int64_t> codebook;  // block values, ascending
  std::vector<std::uint8_t> encoder_map;
  std::string key;  // witness tie-break key, built lazily before filtering
};

std::string witness_key(std::int64_t n, const std::vector<std::int64_t>& codebook,
                        const std::vector<std::uint8_t>& encoder_map) {
  std::string key;
  key.reserve(codebook.size() * (static_cast<std::size_t>(n) + 1) +
              encoder_map.size() + 1);
  for (std::int64_t v : codebook) {
    key += Block::from_bits(n, static_cast<std::uint64_t>(v)).to_string();
    key += ' ';
  }
  key += '|';
  for (std::uint8_t digit : encoder_map) key += "0123456789abcdef"[digit];
  return key;
}

bool strictly_dominates(const Candidate& a, const Candidate& b) {
  return a.distortion <= b.distortion + kTol && a.sigma <= b.sigma + kTol &&
         (a.distortion < b.distortion - kTol || a.sigma < b.sigma - kTol);
}

bool coordinates_tie(const Candidate& a, const Candidate& b) {
  return std::abs(a.distortion - b.distortion) <= kTol &&
         std::abs(a.sigma - b.sigma) <= kTol;
}

// Keeps a running nondominated set; ties keep the smaller witness key.
void pareto_insert(std::vector<Candidate>& kept, Candidate candidate) {
  for (const auto& q : kept) {
    if (strictly_dominates(q, candidate)) return;
    if (coordinates_tie(q, candidate) && q.key <= candidate.key) return;
  }
  std::erase_if(kept, [&](const Candidate& q) {
    return strictly_dominates(candidate, q) ||
           (coordinates_tie(candidate, q) && candidate.key < q.key);
  });
  kept.push_back(std::move(candidate));
}

std::vector<Candidate> pareto_filter(std::vector<Candidate> candidates) {
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.distortion != b.distortion) return a.distortion < b.distortion;
              if (a.sigma != b.sigma) return a.sigma < b.sigma;
              return a.key < b.key;
            });
  std::vector<Candidate> kept;
  for (auto& c : candidates) pareto_insert(kept, std::move(c));
  std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
    if (a.distortion != b.distortion) return a.distortion < b.distortion;
    return a.sigma < b.sigma;
  });
  return kept;
}

struct Problem {
  std::int64_t n;
  std::int64_t block_count;
  std::vector<double> prob;                    // per block value
  std::vector<std::vector<std::int64_t>> dist;  // Hamming distances
};

Problem make_problem(const SourceModel& model, std::int64_t n) {
  Problem problem;
  problem.n = n;
  problem.block_count = std::int64_t{1} << n;
  const TypeClassTable table = build_type_table(model, n);
  problem.prob.resize(static_cast<std::size_t>(problem.block_count));
  for (std::int64_t v = 0; v < problem.block_count; ++v)
    problem.prob[static_cast<std::size_t>(v)] = std::exp2(
        table.rows[static_cast<std::size_t>(std::popcount(static_cast<std::uint64_t>(v)))]
            .log2_atom_prob);
  problem.dist.assign(static_cast<std::size_t>(problem.block_count),
                      std::vector<std::int64_t>(static_cast<std::size_t>(problem.block_count)));
  for (std::int64_t x = 0; x < problem.block_count; ++x)
    for (std::int64_t y = 0; y < problem.block_count; ++y)
      problem.dist[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] =
          std::popcount(static_cast<std::uint64_t>(x ^ y));
  return problem;
}

std::pair<double, double> score_map(const Problem& problem,
                                    const std::vector<std::int64_t>& codebook,
                                    const std::vector<std::uint8_t>& encoder_map) {
  const std::size_t s = codebook.size();
  double distortion = 0.0;
  std::vector<double> mass(s, 0.0);
  for (std::int64_t v = 0; v < problem.block_count; ++v) {
    const std::uint8_t j = encoder_map[static_cast<std::size_t>(v)];
    distortion += problem.prob[static_cast<std::size_t>(v)] *
                  static_cast<double>(
                      problem.dist[static_cast<std::size_t>(v)]
                                  [static_cast<std::size_t>(codebook[j])]);
    mass[j] += problem.prob[static_cast<std::size_t>(v)];
  }
  distortion /= static_cast<double>(problem.n);
  double sigma = 0.0;
  for (std::size_t j = 0; j < s; ++j) {
    const double excess = mass[j] - problem.prob[static_cast<std::size_t>(codebook[j])];
    if (excess > 0.0) sigma += excess;
  }
  return {distortion, sigma};
}

// All encoder maps for one codebook, pruned to a local Pareto set. Scoring
// stays allocation-free; witnesses are materialized only for survivors.
std::vector<Candidate> exhaust_codebook(const Problem& problem,
                                        const std::vector<std::int64_t>& codebook) {
  const std::size_t s = codebook.size();
  const std::size_t b = static_cast<std::size_t>(problem.block_count);
  std::vector<std::uint8_t> digits(b, 0);
  std::vector<double> mass(s);
  std::vector<Candidate> kept;
  const double inv_n = 1.0 / static_cast<double>(problem.n);
  for (;;) {
    std::fill(mass.begin(), mass.end(), 0.0);
    double distortion = 0.0;
    for (std::size_t v = 0; v < b; ++v) {
      const std::uint8_t j = digits[v];
      distortion += problem.prob[v] *
                    static_cast<double>(problem.dist[v][static_cast<std::size_t>(
                        codebook[j])]);
      mass[j] += problem.prob[v];
    }
    distortion *= inv_n;
    double sigma = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      const double excess = mass[j] - problem.prob[static_cast<std::size_t>(codebook[j])];
      if (excess > 0.0) sigma += excess;
    }

    Candidate probe{distortion, sigma, {}, {}, {}};
    bool rejected = false;
    std::string probe_key;
    for (const auto& q : kept) {
      if (strictly_dominates(q, probe)) {
        rejected = true;
        break;
      }
      if (coordinates_tie(q, probe)) {
        if (probe_key.empty()) probe_key = witness_key(problem.n, codebook, digits);
        if (q.key <= probe_key) {
          rejected = true;
          break;
        }
      }
    }
    if (!rejected) {
      if (probe_key.empty()) probe_key = witness_key(problem.n, codebook, digits);
      Candidate candidate{distortion, sigma, codebook, digits, std::move(probe_key)};
      std::erase_if(kept, [&](const Candidate& q) {
        return strictly_dominates(candidate, q) ||
               (coordinates_tie(candidate, q) && candidate.key < q.key);
      });
      kept.push_back(std::move(candidate));
    }

    // odometer increment, least significant digit first
    std::size_t pos = 0;
    while (pos < b) {
      if (++digits[pos] < s) break;
      digits[pos] = 0;
      ++pos;
    }
    if (pos == b) break;
  }
  return kept;
}

std::vector<std::uint8_t> nearest_map(const Problem& problem,
                                      const std::vector<std::int64_t>& codebook) {
  std::vector<std::uint8_t> map(static_cast<std::size_t>(problem.block_count), 0);
  for (std::int64_t v = 0; v < problem.block_count; ++v) {
    std::int64_t best = problem.dist[static_cast<std::size_t>(v)]
                                    [static_cast<std::size_t>(codebook[0])];
    std::uint8_t best_j = 0;
    for (std::size_t j = 1; j < codebook.size(); ++j) {
      const std::int64_t d = problem.dist[static_cast<std::size_t>(v)]
                                         [static_cast<std::size_t>(codebook[j])];
      if (d < best) {
        best = d;
        best_j = static_cast<std::uint8_t>(j);
      }
    }
    map[static_cast<std::size_t>(v)] = best_j;
  }
  return map;
}

// Members of the codebook map to themselves, everything else to its nearest
// codeword: sigma is then exactly 1 - top_mass of the codebook set.
std::vector<std::uint8_t> fixing_map(const Problem& problem,
                                     const std::vector<std::int64_t>& codebook) {
  std::vector<std::uint8_t> map = nearest_map(problem, codebook);
  for (std::size_t j = 0; j < codebook.size(); ++j)
    map[static_cast<std::size_t>(codebook[j])] = static_cast<std::uint8_t>(j);
  return map;
}

// Hill-climb on lambda * D + (1 - lambda) * sigma over single-block
// reassignments; records the local optimum.
Candidate local_search(const Problem& problem,
                       const std::vector<std::int64_t>& codebook,
                       std::vector<std::uint8_t> map, double lambda) {
  const std::size_t s = codebook.size();
  std::vector<double> mass(s, 0.0);
  double distortion_total = 0.0;  // in block units, not per symbol
  for (std::int64_t v = 0; v < problem.block_count; ++v) {
    const std::uint8_t j = map[static_cast<std::size_t>(v)];
    distortion_total += problem.prob[static_cast<std::size_t>(v)] *
                        static_cast<double>(
                            problem.dist[static_cast<std::size_t>(v)]
                                        [static_cast<std::size_t>(codebook[j])]);
    mass[j] += problem.prob[static_cast<std::size_t>(v)];
  }
  auto sigma_of = [&](const std::vector<double>& masses) {
    double sigma = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      const double excess =
          masses[j] - problem.prob[static_cast<std::size_t>(codebook[j])];
      if (excess > 0.0) sigma += excess;
    }
    return sigma;
  };

  double sigma = sigma_of(mass);
  const double inv_n = 1.0 / static_cast<double>(problem.n);
  double objective = lambda * distortion_total * inv_n + (1.0 - lambda) * sigma;

  bool improved = true;
  while (improved) {
    improved = false;
    for (std::int64_t v = 0; v < problem.block_count; ++v) {
      const double p = problem.prob[static_cast<std::size_t>(v)];
      const std::uint8_t j_old = map[static_cast<std::size_t>(v)];
      for (std::size_t j_new = 0; j_new < s; ++j_new) {
        if (j_new == j_old) continue;
        const double delta_dist =
            p * static_cast<double>(
                    problem.dist[static_cast<std::size_t>(v)]
                                [static_cast<std::size_t>(codebook[j_new])] -
                    problem.dist[static_cast<std::size_t>(v)]
                                [static_cast<std::size_t>(codebook[j_old])]);
        mass[j_old] -= p;
        mass[static_cast<std::size_t>(j_new)] += p;
        const double new_sigma = sigma_of(mass);
        const double new_objective =
            lambda * (distortion_total + delta_dist) * inv_n +
            (1.0 - lambda) * new_sigma;
        if (new_objective < objective - 1e-15) {
          distortion_total += delta_dist;
          sigma = new_sigma;
          objective = new_objective;
          map[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(j_new);
          improved = true;
          break;
        }
        mass[j_old] += p;
        mass[static_cast<std::size_t>(j_new)] -= p;
      }
    }
  }

  auto [final_distortion, final_sigma] = score_map(problem, codebook, map);
  return Candidate{final_distortion, final_sigma, codebook, map,
                   witness_key(problem.n, codebook, map)};
}

std::vector<FrontierPoint> finalize(std::vector<Candidate> candidates,
                                    std::int64_t n, std::uint64_t m,
                                    bool exhaustive) {
  std::vector<FrontierPoint> frontier;
  for (auto& c : pareto_filter(std::move(candidates))) {
    FrontierPoint point;
    point.m = m;
    point.distortion = c.distortion;
    point.sigma = c.sigma;
    point.exhaustive = exhaustive;
    point.witness.encoder_map = std::move(c.encoder_map);
    for (std::int64_t v : c.codebook)
      point.witness.codebook.push_back(Block::from_bits(n, static_cast<std::uint64_t>(v)));
    frontier.push_back(std::move(point));
  }
  return frontier;
}

}  // namespace

std::string CodecWitness::to_line() const {
  std::string line;
  for (std::size_t i = 0; i < codebook.size(); ++i) {
    if (i) line += ' ';
    line += codebook[i].to_string();
  }
  line += '|';
  for (std::uint8_t digit : encoder_map) line += "0123456789abcdef"[digit];
  return line;
}

std::pair<double, double> evaluate_witness(const SourceModel& model,
                                           std::int64_t n,
                                           const CodecWitness& witness) {
  const Problem problem = make_problem(model, n);
  std::vector<std::int64_t> codebook;
  for (const auto& block : witness.codebook)
    codebook.push_back(static_cast<std::int64_t>(block.as_uint64()));
  return score_map(problem, codebook, witness.encoder_map);
}

double min_sigma_closed_form(const SourceModel& model, std::int64_t n,
                             std::uint64_t m) {
  if (m < 1) throw std::invalid_argument("min_sigma_closed_form: M must be >= 1");
  return 1.0 - top_mass(model, n, m);
}

std::vector<FrontierPoint> enumerate_frontier(const SourceModel& model,
                                              std::int64_t n, std::uint64_t m,
                                              bool heuristic, std::uint64_t seed,
                                              int workers) {
  if (n < 1) throw std::invalid_argument("enumerate_frontier: n must be >= 1");
  if (m < 1) throw std::invalid_argument("enumerate_frontier: M must be >= 1");
  if (!heuristic && n > 3)
    throw std::invalid_argument(
        "enumerate_frontier: exhaustive search is limited to n <= 3; "
        "pass the heuristic flag for n = 4");
  if (heuristic && n > 4)
    throw std::invalid_argument("enumerate_frontier: heuristic mode is limited to n <= 4");

  const Problem problem = make_problem(model, n);
  const std::int64_t block_count = problem.block_count;
  const std::size_t s = static_cast<std::size_t>(
      std::min<std::uint64_t>(m, static_cast<std::uint64_t>(block_count)));

  // Any codec with fewer than s reconstruction values is reproduced by a
  // size-s codebook with unused entries, so size-s codebooks suffice.
  if (!heuristic) {
    std::vector<std::vector<std::int64_t>> codebooks;
    std::vector<std::int64_t> combo(s);
    std::iota(combo.begin(), combo.end(), 0);
    for (;;) {
      codebooks.push_back(combo);
      std::int64_t i = static_cast<std::int64_t>(s) - 1;
      while (i >= 0 && combo[static_cast<std::size_t>(i)] ==
                           block_count - static_cast<std::int64_t>(s) + i)
        --i;
      if (i < 0) break;
      ++combo[static_cast<std::size_t>(i)];
      for (std::size_t j = static_cast<std::size_t>(i) + 1; j < s; ++j)
        combo[j] = combo[j - 1] + 1;
    }

    std::vector<std::vector<Candidate>> per_codebook(codebooks.size());
    std::atomic<std::size_t> next{0};
    auto run = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= codebooks.size()) return;
        per_codebook[i] = exhaust_codebook(problem, codebooks[i]);
      }
    };
    const int thread_count =
        std::max(1, std::min<int>(workers, static_cast<int>(codebooks.size())));
    if (thread_count <= 1) {
      run();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < thread_count; ++t) pool.emplace_back(run);
      for (auto& t : pool) t.join();
    }

    std::vector<Candidate> all;
    for (auto& local : per_codebook)
      for (auto& c : local) all.push_back(std::move(c));
    return finalize(std::move(all), n, m, /*exhaustive=*/true);
  }

  // Heuristic mode: scalarized local search over encoder maps from random
  // restarts, plus seeded codebooks/maps that pin down the extreme points.
  std::vector<Candidate> all;
  auto sweep = [&](const std::vector<std::int64_t>& codebook,
                   const std::vector<std::uint8_t>& start) {
    for (int li = 0; li <= 8; ++li)
      all.push_back(local_search(problem, codebook, start, static_cast<double>(li) / 8.0));
  };

  // Top-mass codebook: the s most probable blocks.
  std::vector<std::int64_t> by_prob(static_cast<std::size_t>(block_count));
  std::iota(by_prob.begin(), by_prob.end(), 0);
  std::stable_sort(by_prob.begin(), by_prob.end(), [&](std::int64_t a, std::int64_t b) {
    return problem.prob[static_cast<std::size_t>(a)] >
           problem.prob[static_cast<std::size_t>(b)];
  });
  std::vector<std::int64_t> top_codebook(by_prob.begin(),
                                         by_prob.begin() + static_cast<std::int64_t>(s));
  std::sort(top_codebook.begin(), top_codebook.end());
  sweep(top_codebook, fixing_map(problem, top_codebook));
  sweep(top_codebook, nearest_map(problem, top_codebook));

  constexpr int kRestarts = 64;
  for (int restart = 0; restart < kRestarts; ++restart) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(restart));
    // Random size-s codebook via partial Fisher-Yates.
    std::vector<std::int64_t> pool_values(static_cast<std::size_t>(block_count));
    std::iota(pool_values.begin(), pool_values.end(), 0);
    for (std::size_t i = 0; i < s; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(
                  static_cast<std::size_t>(block_count) - i)));
      std::swap(pool_values[i], pool_values[j]);
    }
    std::vector<std::int64_t> codebook(pool_values.begin(),
                                       pool_values.begin() + static_cast<std::int64_t>(s));
    std::sort(codebook.begin(), codebook.end());
    std::vector<std::uint8_t> map(static_cast<std::size_t>(block_count));
    for (auto& digit : map)
      digit = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(s)));
    sweep(codebook, map);
    sweep(codebook, nearest_map(problem, codebook));
    sweep(codebook, fixing_map(problem, codebook));
  }
  return finalize(std::move(all), n, m, /*exhaustive=*/false);
}

}  // namespace rdp
