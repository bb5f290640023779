#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace rdp {

// Fixed-length binary word. Bit positions run 0..n-1; position 0 is the
// first symbol and the most significant position for lexicographic order.
// Storage is packed LSB-first into 64-bit words, so blocks with n <= 64
// round-trip through a plain integer whose bit i is position i.
class Block {
 public:
  Block() : n_(0) {}

  explicit Block(std::int64_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static Block from_bits(std::int64_t n, std::uint64_t bits);
  static Block from_string(const std::string& s);

  std::int64_t length() const { return n_; }

  bool bit(std::int64_t i) const {
    return (words_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1u;
  }

  void set_bit(std::int64_t i, bool value) {
    const std::uint64_t mask = 1ull << (i & 63);
    auto& word = words_[static_cast<std::size_t>(i) >> 6];
    if (value)
      word |= mask;
    else
      word &= ~mask;
  }

  std::int64_t ones_count() const {
    std::int64_t total = 0;
    for (std::uint64_t w : words_) total += std::popcount(w);
    return total;
  }

  std::int64_t hamming_distance(const Block& other) const;

  // Requires n <= 64.
  std::uint64_t as_uint64() const;

  std::string to_string() const;

  bool operator==(const Block& other) const = default;

  // Lexicographic by position sequence (position 0 compared first).
  bool operator<(const Block& other) const;

 private:
  std::int64_t n_;
  std::vector<std::uint64_t> words_;
};

}  // namespace rdp
