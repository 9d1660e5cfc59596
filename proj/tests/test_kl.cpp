#include "mcig/error.hpp"
#include "mcig/kl.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace mcig;

TEST(McKl, IdenticalDensitiesGiveExactZero) {
  const auto p = ComponentDensity::gaussian(0.4, 1.3);
  EXPECT_EQ(mc_kl_estimate(p, p, 1000, 1, KlVariant::Naive), 0.0);
  EXPECT_EQ(mc_kl_estimate(p, p, 1000, 1, KlVariant::Extended), 0.0);
}

TEST(McKl, ExtendedNeverNegative) {
  mcig::testing::Random rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = ComponentDensity::gaussian(rng.uniform(-1, 1), rng.uniform(0.5, 2));
    const auto q = ComponentDensity::gaussian(rng.uniform(-1, 1), rng.uniform(0.5, 2));
    EXPECT_GE(mc_kl_estimate(p, q, 50, rng.bits(), KlVariant::Extended), 0.0);
  }
}

TEST(McKl, NaiveCanBeNegative) {
  const auto p = ComponentDensity::gaussian(0, 1);
  const auto q = ComponentDensity::gaussian(1e-3, 1);
  bool negative = false;
  for (Seed seed = 0; seed < 10; ++seed)
    negative = negative || mc_kl_estimate(p, q, 100, seed, KlVariant::Naive) < 0;
  EXPECT_TRUE(negative);
}

TEST(McKl, BothVariantsConverge) {
  const auto p = ComponentDensity::gaussian(0, 1);
  const auto q = ComponentDensity::gaussian(1, 1.5);
  const double exact = mcig::testing::gaussian_kl(0, 1, 1, 1.5);
  for (auto variant : {KlVariant::Naive, KlVariant::Extended})
    EXPECT_LE(std::abs(mc_kl_estimate(p, q, 100000, 3, variant) - exact), 0.03 * exact);
}

TEST(McKl, NonFiniteRatioNamesTheVariate) {
  const auto p = ComponentDensity::cauchy(0, 1);
  const ComponentDensity q(
      "truncated", [](double x) { return x > 0 ? 0.0 : -std::numeric_limits<double>::infinity(); },
      [](VariateStream &s) { return s.uniform(); });
  try {
    (void)mc_kl_estimate(p, q, 100, 1, KlVariant::Naive);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
    EXPECT_NE(std::string(e.what()).find("variate"), std::string::npos);
  }
  EXPECT_THROW((void)mc_kl_estimate(p, p, 0, 1, KlVariant::Naive), Error);
}

TEST(ExtendedKlTerm, SeriesAndDirectBranchesAgree) {
  for (double y : {-5.0, -0.5, -0.1, -1e-3, 0.0, 1e-8, 0.05, 0.1, 2.0, 30.0}) {
    const double direct = y + std::exp(-y) - 1;
    EXPECT_NEAR(extended_kl_term(y), direct, 1e-15 + 1e-12 * std::abs(direct)) << y;
    EXPECT_GE(extended_kl_term(y), 0.0);
  }
  EXPECT_NEAR(extended_kl_term(1e-6), 0.5e-12 - 1e-18 / 6 + 1e-24 / 24, 2e-28);
}
