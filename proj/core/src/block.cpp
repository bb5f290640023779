#include "rdp/block.hpp"

#include <stdexcept>

namespace rdp {

Block Block::from_bits(std::int64_t n, std::uint64_t bits) {
  if (n < 0 || n > 64) throw std::invalid_argument("Block::from_bits: n must be in [0, 64]");
  if (n < 64 && (bits >> n) != 0)
    throw std::invalid_argument("Block::from_bits: bits exceed block length");
  Block b(n);
  if (n > 0) b.words_[0] = bits;
  return b;
}

Block Block::from_string(const std::string& s) {
  Block b(static_cast<std::int64_t>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1')
      b.set_bit(static_cast<std::int64_t>(i), true);
    else if (s[i] != '0')
      throw std::invalid_argument("Block::from_string: expected only '0'/'1'");
  }
  return b;
}

std::int64_t Block::hamming_distance(const Block& other) const {
  if (n_ != other.n_) throw std::invalid_argument("hamming_distance: length mismatch");
  std::int64_t total = 0;
  for (std::size_t i = 0; i < words_.size(); ++i)
    total += std::popcount(words_[i] ^ other.words_[i]);
  return total;
}

std::uint64_t Block::as_uint64() const {
  if (n_ > 64) throw std::logic_error("Block::as_uint64: block longer than 64 bits");
  return words_.empty() ? 0 : words_[0];
}

std::string Block::to_string() const {
  std::string s(static_cast<std::size_t>(n_), '0');
  for (std::int64_t i = 0; i < n_; ++i)
    if (bit(i)) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

bool Block::operator<(const Block& other) const {
  if (n_ != other.n_) return n_ < other.n_;
  for (std::int64_t i = 0; i < n_; ++i) {
    const bool a = bit(i), b = other.bit(i);
    if (a != b) return b;  // '0' < '1'
  }
  return false;
}

}  // namespace rdp
