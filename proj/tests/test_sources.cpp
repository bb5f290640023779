#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "brute_force.hpp"
#include "rdp/binomial.hpp"
#include "rdp/rng.hpp"
#include "rdp/sources.hpp"

using namespace rdp;

namespace {

const std::vector<SourceModel>& sample_models() {
  static const std::vector<SourceModel> models = {
      SourceModel::bernoulli(0.5),
      SourceModel::bernoulli(0.3),
      SourceModel::bernoulli(0.0),
      SourceModel::bernoulli(1.0),
      SourceModel::paper_mixed(),
      SourceModel({{0.25, 0.5}, {0.75, 0.75}}),
      SourceModel({{0.2, 0.1}, {0.3, 0.6}, {0.5, 0.9}}),
  };
  return models;
}

}  // namespace

TEST_SUITE("sources") {

TEST_CASE("model validation") {
  CHECK_THROWS_AS(SourceModel({}), std::invalid_argument);
  CHECK_THROWS_AS(SourceModel({{0.5, 0.5}}), std::invalid_argument);  // weights != 1
  CHECK_THROWS_AS(SourceModel({{1.0, 1.5}}), std::invalid_argument);
  CHECK_THROWS_AS(SourceModel({{-0.5, 0.5}, {1.5, 0.5}}), std::invalid_argument);
  CHECK_NOTHROW(SourceModel({{1.0, 0.0}}));
}

TEST_CASE("source spec parsing") {
  CHECK(SourceModel::parse("paper-mixed").is_paper_mixed());
  const SourceModel b = SourceModel::parse("bernoulli:0.3");
  REQUIRE(b.components().size() == 1);
  CHECK(b.components()[0].p == doctest::Approx(0.3).epsilon(1e-15));
  const SourceModel m = SourceModel::parse("mix:0.5*0.5,0.5*0.75");
  CHECK(m.is_paper_mixed());
  CHECK_THROWS_AS(SourceModel::parse("mix:0.5*0.5"), std::invalid_argument);
  CHECK_THROWS_AS(SourceModel::parse("nonsense"), std::invalid_argument);
  CHECK_THROWS_AS(SourceModel::parse("bernoulli:0.5x"), std::invalid_argument);
}

TEST_CASE("block_log_prob examples") {
  // Uniform: every length-8 block has probability 2^-8.
  CHECK(block_log_prob(SourceModel::bernoulli(0.5), 3, 8) == doctest::Approx(-8.0).epsilon(1e-15));

  // Canonical mixture, direct evaluation of the two-component sum.
  const SourceModel mixed = SourceModel::paper_mixed();
  const double expect_k1_n1 = std::log2(0.5 * 0.5 + 0.5 * 0.75);  // log2(5/8)
  CHECK(block_log_prob(mixed, 1, 1) == doctest::Approx(expect_k1_n1).epsilon(1e-15));
  CHECK(block_log_prob(mixed, 1, 1) == doctest::Approx(-0.678071905112638).epsilon(1e-12));
  const double expect_k0_n2 = std::log2(0.5 * 0.25 + 0.5 * (1.0 / 16.0));  // log2(5/32)
  CHECK(block_log_prob(mixed, 0, 2) == doctest::Approx(expect_k0_n2).epsilon(1e-15));

  CHECK_THROWS_AS(block_log_prob(mixed, -1, 4), std::invalid_argument);
  CHECK_THROWS_AS(block_log_prob(mixed, 5, 4), std::invalid_argument);
  CHECK_THROWS_AS(block_log_prob(mixed, 0, 0), std::invalid_argument);
}

TEST_CASE("block_log_prob agrees with first-principles products") {
  for (const auto& model : sample_models()) {
    for (std::int64_t n : {1, 2, 5, 11}) {
      for (std::uint64_t v : {0ull, 1ull, (1ull << n) - 1, (1ull << n) / 3}) {
        const double expected = brute::block_prob(model, n, v);
        const std::int64_t k = std::popcount(v);
        const double got = std::exp2(block_log_prob(model, k, n));
        if (expected == 0.0)
          CHECK(got == 0.0);
        else
          CHECK(got == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("exchangeability: probability depends only on the ones-count") {
  for (const auto& model : sample_models()) {
    const std::int64_t n = 13;
    // pairs of blocks with the same ones-count but different positions
    const std::uint64_t a = 0b1010010011011, b = 0b1101100101001;
    REQUIRE(std::popcount(a) == std::popcount(b));
    CHECK(brute::block_prob(model, n, a) == doctest::Approx(brute::block_prob(model, n, b)).epsilon(1e-14));
    const double table_prob = std::exp2(block_log_prob(model, std::popcount(a), n));
    if (brute::block_prob(model, n, a) > 0.0)
      CHECK(table_prob == doctest::Approx(brute::block_prob(model, n, a)).epsilon(1e-12));
  }
}

TEST_CASE("build_type_table examples") {
  const TypeClassTable uniform = build_type_table(SourceModel::bernoulli(0.5), 2);
  REQUIRE(uniform.rows.size() == 3);
  CHECK(uniform.rows[0].exact_count == 1);
  CHECK(uniform.rows[1].exact_count == 2);
  CHECK(uniform.rows[2].exact_count == 1);
  for (const auto& row : uniform.rows)
    CHECK(row.log2_atom_prob == doctest::Approx(-2.0).epsilon(1e-15));

  const TypeClassTable mixed = build_type_table(SourceModel::paper_mixed(), 1);
  REQUIRE(mixed.rows.size() == 2);
  CHECK(mixed.rows[0].exact_count == 1);
  CHECK(mixed.rows[1].exact_count == 1);
  CHECK(mixed.rows[0].log2_atom_prob == doctest::Approx(std::log2(3.0 / 8.0)).epsilon(1e-15));
  CHECK(mixed.rows[1].log2_atom_prob == doctest::Approx(std::log2(5.0 / 8.0)).epsilon(1e-15));

  CHECK_THROWS_AS(build_type_table(SourceModel::bernoulli(0.5), 0), std::invalid_argument);
}

TEST_CASE("type table total mass is 1, brute force agrees at small n") {
  for (const auto& model : sample_models()) {
    for (std::int64_t n : {1, 2, 3, 8, 14}) {
      const TypeClassTable table = build_type_table(model, n);
      CHECK(std::abs(table.total_mass - 1.0) <= 1e-9);
      CHECK(brute::total_mass(model, n) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  // canonical source, one larger exhaustive check
  const TypeClassTable table = build_type_table(SourceModel::paper_mixed(), 20);
  CHECK(std::abs(table.total_mass - 1.0) <= 1e-9);
  CHECK(brute::total_mass(SourceModel::paper_mixed(), 20) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("type table works in the log domain at n = 100000") {
  const TypeClassTable table = build_type_table(SourceModel::paper_mixed(), 100000);
  CHECK(table.rows.size() == 100001);
  CHECK(std::abs(table.total_mass - 1.0) <= 1e-9);
}

TEST_CASE("top_mass examples") {
  const SourceModel uniform = SourceModel::bernoulli(0.5);
  CHECK(top_mass(uniform, 2, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(top_mass(uniform, 2, 4) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(top_mass(uniform, 2, 100) == 1.0);
  // canonical mixture, n=2: block 11 is the most probable, 13/32
  CHECK(top_mass(SourceModel::paper_mixed(), 2, 1) == doctest::Approx(13.0 / 32.0).epsilon(1e-14));
  CHECK_THROWS_AS(top_mass(uniform, 2, 0), std::invalid_argument);
}

TEST_CASE("top_mass is nondecreasing in M and matches brute force") {
  for (const auto& model : sample_models()) {
    for (std::int64_t n : {1, 3, 6, 10}) {
      double previous = 0.0;
      for (std::uint64_t m = 1; m <= (1ull << n); ++m) {
        const double mass = top_mass(model, n, m);
        CHECK(mass >= previous - 1e-13);
        CHECK(mass == doctest::Approx(brute::top_mass(model, n, m)).epsilon(1e-11));
        previous = mass;
      }
      CHECK(top_mass(model, n, 1ull << n) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("top_mass handles huge budgets at large n") {
  // n beyond exact 64-bit counts: whole mid classes can never be consumed
  const double mass = top_mass(SourceModel::paper_mixed(), 200, 1ull << 40);
  CHECK(mass >= 0.0);
  CHECK(mass <= 1.0);
}

TEST_CASE("sample_block degenerate components") {
  Rng rng(1);
  const auto [ones, c1] = sample_block(SourceModel::bernoulli(1.0), 4, rng);
  CHECK(ones.ones_count() == 4);
  const auto [zeros, c0] = sample_block(SourceModel::bernoulli(0.0), 4, rng);
  CHECK(zeros.ones_count() == 0);
  CHECK_THROWS_AS(sample_block(SourceModel::bernoulli(0.5), 0, rng), std::invalid_argument);
}

TEST_CASE("sample_block concentrates on the drawn component at n = 10^4") {
  const SourceModel model = SourceModel::paper_mixed();
  Rng rng(42);
  const int draws = 400;
  int within = 0;
  for (int i = 0; i < draws; ++i) {
    const auto [block, component] = sample_block(model, 10000, rng);
    const double fraction = static_cast<double>(block.ones_count()) / 10000.0;
    const double target = model.components()[component].p;
    if (std::abs(fraction - target) <= 0.02) ++within;
  }
  CHECK(static_cast<double>(within) / draws > 0.99);
}

TEST_CASE("sample_block frequencies at n = 1 match block_log_prob") {
  const SourceModel model = SourceModel::paper_mixed();
  Rng rng(7);
  const std::int64_t draws = 1000000;
  std::int64_t ones = 0;
  for (std::int64_t i = 0; i < draws; ++i)
    if (sample_block(model, 1, rng).first.bit(0)) ++ones;
  const double p1 = std::exp2(block_log_prob(model, 1, 1));  // 5/8
  const double freq = static_cast<double>(ones) / static_cast<double>(draws);
  const double standard_error = std::sqrt(p1 * (1.0 - p1) / static_cast<double>(draws));
  CHECK(std::abs(freq - p1) <= 3.0 * standard_error);
}

TEST_CASE("sampling substreams are independent of how draws are split") {
  const SourceModel model = SourceModel::paper_mixed();
  Rng a = Rng::substream(99, 5);
  Rng b = Rng::substream(99, 5);
  for (int i = 0; i < 100; ++i) {
    const auto [ba, ca] = sample_block(model, 17, a);
    const auto [bb, cb] = sample_block(model, 17, b);
    CHECK(ba == bb);
    CHECK(ca == cb);
  }
  // distinct streams diverge
  Rng c = Rng::substream(99, 6);
  bool any_different = false;
  for (int i = 0; i < 20 && !any_different; ++i)
    any_different = !(sample_block(model, 17, c).first == sample_block(model, 17, a).first);
  CHECK(any_different);
}

TEST_CASE("binomial helpers") {
  CHECK(*binom_capped(0, 0) == 1);
  CHECK(*binom_capped(10, 3) == 120);
  CHECK(*binom_capped(64, 32) == 1832624140942590534ull);
  CHECK(!binom_capped(300, 150).has_value());  // above any 64-bit cap
  CHECK(log2_binom(10, 3) == doctest::Approx(std::log2(120.0)).epsilon(1e-12));
  const auto rows = pascal_rows(12);
  CHECK(rows[12][5] == 792);
}

}  // TEST_SUITE
