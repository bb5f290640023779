#include "rdp/binomial.hpp"

#include <cmath>
#include <stdexcept>

namespace rdp {

std::optional<std::uint64_t> binom_capped(std::int64_t n, std::int64_t k,
                                          std::uint64_t cap) {
  if (n < 0 || k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 acc = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned __int128>(n - k + i);
    acc /= static_cast<unsigned __int128>(i);  // exact: acc is C(n-k+i, i)
    if (acc > cap) return std::nullopt;
  }
  return static_cast<std::uint64_t>(acc);
}

double log2_binom(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) throw std::invalid_argument("log2_binom: bad (n, k)");
  constexpr double kLn2 = 0.6931471805599453094172321;
  return (std::lgamma(static_cast<double>(n) + 1.0) -
          std::lgamma(static_cast<double>(k) + 1.0) -
          std::lgamma(static_cast<double>(n - k) + 1.0)) /
         kLn2;
}

std::vector<std::vector<std::uint64_t>> pascal_rows(std::int64_t n) {
  if (n < 0 || n > 66) throw std::invalid_argument("pascal_rows: n must be in [0, 66]");
  std::vector<std::vector<std::uint64_t>> rows(static_cast<std::size_t>(n) + 1);
  for (std::int64_t r = 0; r <= n; ++r) {
    auto& row = rows[static_cast<std::size_t>(r)];
    row.assign(static_cast<std::size_t>(r) + 1, 1);
    for (std::int64_t c = 1; c < r; ++c)
      row[static_cast<std::size_t>(c)] = rows[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(c - 1)] +
                                         rows[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(c)];
  }
  return rows;
}

}  // namespace rdp
