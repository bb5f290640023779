#include <doctest.h>

#include <cmath>

#include "brute_force.hpp"
#include "rdp/spectra.hpp"

using namespace rdp;

TEST_SUITE("spectra") {

TEST_CASE("binary entropy values") {
  CHECK(binary_entropy(0.5) == 1.0);
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  // direct evaluation of -u log2 u - (1-u) log2(1-u) at u = 1/4
  const double h_quarter = -0.25 * std::log2(0.25) - 0.75 * std::log2(0.75);
  CHECK(binary_entropy(0.25) == doctest::Approx(h_quarter).epsilon(1e-15));
  CHECK(std::abs(binary_entropy(0.25) - 0.811278) <= 1e-6);
  CHECK_THROWS_AS(binary_entropy(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(binary_entropy(1.01), std::invalid_argument);
}

TEST_CASE("binary entropy symmetry") {
  for (double u = 0.0; u <= 0.5 + 1e-12; u += 0.01)
    CHECK(binary_entropy(u) == doctest::Approx(binary_entropy(1.0 - u)).epsilon(1e-14));
}

TEST_CASE("binary entropy inverse") {
  CHECK(binary_entropy_inv(1.0) == 0.5);
  CHECK(binary_entropy_inv(0.0) == 0.0);
  CHECK(binary_entropy_inv(0.811278) == doctest::Approx(0.25).epsilon(1e-5));
  CHECK_THROWS_AS(binary_entropy_inv(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(binary_entropy_inv(1.1), std::invalid_argument);
  for (double d = 0.0; d <= 0.5 + 1e-12; d += 0.005)
    CHECK(std::abs(binary_entropy_inv(binary_entropy(std::min(d, 0.5))) - std::min(d, 0.5)) <= 1e-10);
}

TEST_CASE("step function conventions") {
  // thresholds carry the new level at the threshold itself
  const StepFunction f({0.8, 1.0}, {1.0, 0.5, 0.0});
  CHECK(f(0.0) == 1.0);
  CHECK(f(0.79) == 1.0);
  CHECK(f(0.8) == 0.5);
  CHECK(f(0.99) == 0.5);
  CHECK(f(1.0) == 0.0);
  CHECK(f(2.0) == 0.0);

  CHECK_THROWS_AS(StepFunction({0.5}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction({0.5, 0.5}, {1.0, 0.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction({0.5}, {0.5, 1.0}), std::invalid_argument);
}

TEST_CASE("spectral_cdf_exact boundary behavior on the uniform source") {
  const SourceModel uniform = SourceModel::bernoulli(0.5);
  for (std::int64_t n : {1, 7, 20, 4000}) {
    CHECK(spectral_cdf_exact(uniform, n, 1.0) == 1.0);   // weak inequality
    CHECK(spectral_cdf_exact(uniform, n, 1.01) == 0.0);
    CHECK(spectral_cdf_exact(uniform, n, 0.37) == 1.0);
  }
}

TEST_CASE("spectral_cdf_exact equals brute-force enumeration at small n") {
  const std::vector<SourceModel> models = {
      SourceModel::bernoulli(0.5), SourceModel::bernoulli(0.2),
      SourceModel::paper_mixed(), SourceModel({{0.2, 0.1}, {0.3, 0.6}, {0.5, 0.9}})};
  for (const auto& model : models) {
    for (std::int64_t n : {1, 4, 9, 16}) {
      for (double r = 0.0; r <= 2.0 + 1e-12; r += 0.037)
        CHECK(spectral_cdf_exact(model, n, r) ==
              doctest::Approx(brute::exceedance(model, n, r)).epsilon(1e-12));
    }
  }
}

TEST_CASE("spectral_cdf_exact is nonincreasing in R") {
  for (const auto& model : {SourceModel::paper_mixed(), SourceModel::bernoulli(0.3)}) {
    for (std::int64_t n : {5, 50, 500}) {
      const TypeClassTable table = build_type_table(model, n);
      double previous = 1.0;
      for (int i = 0; i <= 100; ++i) {
        const double r = 1.3 * static_cast<double>(i) / 100.0;
        const double value = spectral_cdf_exact(table, r);
        CHECK(value <= previous + 1e-15);
        previous = value;
      }
    }
  }
}

TEST_CASE("asymptotic step function of the canonical mixture") {
  const StepFunction f = asymptotic_spectral_cdf(SourceModel::paper_mixed());
  REQUIRE(f.thresholds().size() == 2);
  REQUIRE(f.levels().size() == 3);
  CHECK(f.thresholds()[0] == doctest::Approx(binary_entropy(0.25)).epsilon(1e-15));
  CHECK(f.thresholds()[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.levels()[0] == 1.0);
  CHECK(f.levels()[1] == 0.5);
  CHECK(f.levels()[2] == 0.0);
  // value at the first threshold is already the new level
  CHECK(f(binary_entropy(0.25)) == 0.5);
  CHECK(f(1.0) == 0.0);
}

TEST_CASE("asymptotic step function of degenerate and generic mixtures") {
  const StepFunction single = asymptotic_spectral_cdf(SourceModel::bernoulli(0.3));
  REQUIRE(single.thresholds().size() == 1);
  CHECK(single.thresholds()[0] == doctest::Approx(binary_entropy(0.3)).epsilon(1e-15));
  CHECK(single.levels() == std::vector<double>{1.0, 0.0});

  const StepFunction skew = asymptotic_spectral_cdf(SourceModel({{0.25, 0.5}, {0.75, 0.75}}));
  REQUIRE(skew.levels().size() == 3);
  CHECK(skew.levels()[1] == doctest::Approx(0.25).epsilon(1e-15));
  // equal-entropy components merge into one threshold: h(0.25) == h(0.75)
  const StepFunction merged = asymptotic_spectral_cdf(SourceModel({{0.5, 0.25}, {0.5, 0.75}}));
  CHECK(merged.thresholds().size() == 1);
  CHECK(merged.levels() == std::vector<double>{1.0, 0.0});
}

TEST_CASE("finite-n curve converges to the asymptotic levels away from thresholds") {
  const SourceModel model = SourceModel::paper_mixed();
  const StepFunction limit = asymptotic_spectral_cdf(model);
  const TypeClassTable table = build_type_table(model, 10000);
  for (double r = 0.05; r <= 1.3; r += 0.01) {
    bool near_threshold = false;
    for (double t : limit.thresholds())
      if (std::abs(r - t) < 0.05) near_threshold = true;
    if (near_threshold) continue;
    CHECK(std::abs(spectral_cdf_exact(table, r) - limit(r)) <= 1e-3);
  }
}

TEST_CASE("cross-check: generic mixture levels against the exact curve at n = 10^4") {
  const SourceModel model({{0.25, 0.5}, {0.75, 0.75}});
  const TypeClassTable table = build_type_table(model, 10000);
  CHECK(std::abs(spectral_cdf_exact(table, 0.7) - 1.0) <= 1e-2);
  CHECK(std::abs(spectral_cdf_exact(table, 0.9) - 0.25) <= 1e-2);
  CHECK(std::abs(spectral_cdf_exact(table, 1.05) - 0.0) <= 1e-2);
}

TEST_CASE("plimsup_estimate") {
  // constant samples collapse to the constant
  std::vector<double> constant(200, 3.25);
  CHECK(plimsup_estimate({{100, constant}}, 0.1) == 3.25);

  // two-point law: the 0.75-quantile of half 0.81 / half 1.0 is 1.0
  std::vector<double> two_point;
  for (int i = 0; i < 100; ++i) two_point.push_back(i < 50 ? 0.81 : 1.0);
  CHECK(plimsup_estimate({{64, two_point}}, 0.25) == 1.0);

  // mean of n coin flips concentrates near 1/2
  Rng rng(11);
  std::vector<double> means;
  const SourceModel uniform = SourceModel::bernoulli(0.5);
  for (int i = 0; i < 500; ++i) {
    const auto [block, comp] = sample_block(uniform, 10000, rng);
    means.push_back(static_cast<double>(block.ones_count()) / 10000.0);
  }
  CHECK(std::abs(plimsup_estimate({{10000, means}}, 0.01) - 0.5) <= 0.02);

  // the largest n with at least 100 samples wins
  std::vector<double> few(5, 9.0);
  CHECK(plimsup_estimate({{10, constant}, {1000, few}}, 0.1) == 3.25);

  CHECK_THROWS_AS(plimsup_estimate({}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(plimsup_estimate({{10, few}}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(plimsup_estimate({{100, constant}}, 0.7), std::invalid_argument);
}

TEST_CASE("exceedance curve helper") {
  const ExceedanceCurve curve =
      compute_exceedance(SourceModel::paper_mixed(), 50, {0.2, 0.9, 1.2});
  REQUIRE(curve.points.size() == 3);
  CHECK(curve.n == 50);
  CHECK(curve.exact);
  CHECK(curve.points[0].second >= curve.points[1].second);
  CHECK(curve.points[1].second >= curve.points[2].second);
}

}  // TEST_SUITE
