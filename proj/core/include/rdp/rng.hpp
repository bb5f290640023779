#pragma once

#include <array>
#include <cstdint>

namespace rdp {

// Deterministic 64-bit generator (xoshiro256**) with substream support.
//
// Substreams are derived by mixing (seed, stream) through splitmix64, so a
// computation split into fixed chunks produces the same draws no matter how
// many workers process the chunks. All methods are branch-stable: the same
// state always consumes the same number of raw outputs for a given call
// sequence, except below(), which rejects to stay unbiased.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, 0) {}

  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ mix64(stream + 0x9e3779b97f4a7c15ull);
    for (auto& word : state_) {
      x += 0x9e3779b97f4a7c15ull;
      word = mix64(x);
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
      state_[0] = 0x853c49e6748fea9bull;
    }
  }

  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(seed, stream);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform integer in [0, bound). Rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  // splitmix64 finalizer
  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace rdp
