#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace rdp {

// Exact C(n, k) while the running value stays <= cap; nullopt once it would
// exceed cap. Intermediates use 128-bit arithmetic, so any n is fine.
std::optional<std::uint64_t> binom_capped(std::int64_t n, std::int64_t k,
                                          std::uint64_t cap = (1ull << 62));

// log2 C(n, k) via lgamma. Relative error around 1e-14 for large n.
double log2_binom(std::int64_t n, std::int64_t k);

// Dense Pascal triangle rows 0..n. Requires n <= 66 so every entry is exact
// in 64 bits.
std::vector<std::vector<std::uint64_t>> pascal_rows(std::int64_t n);

}  // namespace rdp
