#include "mcig/diagnostics.hpp"
#include "mcig/error.hpp"
#include "mcig/geometry.hpp"
#include "mcig/mc_exponential_generator.hpp"
#include "mcig/mc_mixture_generator.hpp"
#include "mcig/oracles.hpp"
#include "mcig/sampling.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mcig;
using mcig::testing::Random;

namespace {

DuallyFlatSpace gaussian_space() { return DuallyFlatSpace(gaussian_ef_oracle()); }

Vector random_gaussian_theta(Random &rng) {
  return mcig::testing::gaussian_theta(rng.uniform(-2, 2), rng.uniform(0.5, 2.0));
}

} // namespace

TEST(BregmanDivergence, Reflexive) {
  const auto space = gaussian_space();
  const Vector t = mcig::testing::gaussian_theta(0.3, 1.2);
  EXPECT_EQ(bregman_divergence(space, t, t), 0.0);
}

TEST(BregmanDivergence, GaussianKlIdentity) {
  const auto space = gaussian_space();
  const Vector p{{0.0, -0.5}}, q{{2.0, -0.5}};
  // B(theta_q : theta_p) = KL(N(2,1) : N(0,1)) = 2.
  EXPECT_NEAR(bregman_divergence(space, q, p), 2.0, 1e-12);
  Random rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const double m1 = rng.uniform(-2, 2), s1 = rng.uniform(0.5, 2);
    const double m2 = rng.uniform(-2, 2), s2 = rng.uniform(0.5, 2);
    const double b = bregman_divergence(space, mcig::testing::gaussian_theta(m2, s2),
                                        mcig::testing::gaussian_theta(m1, s1));
    EXPECT_NEAR(b, mcig::testing::gaussian_kl(m1, s1, m2, s2), 1e-10);
  }
}

TEST(BregmanDivergence, StrictlyPositiveOffDiagonal) {
  const auto space = gaussian_space();
  Random rng(2);
  for (int trial = 0; trial < 100; ++trial)
    EXPECT_GT(bregman_divergence(space, random_gaussian_theta(rng), random_gaussian_theta(rng)), 0.0);
}

TEST(BregmanDivergence, DomainViolation) {
  const auto space = gaussian_space();
  EXPECT_THROW((void)bregman_divergence(space, Vector{{0.0, 1.0}}, Vector{{0.0, -1.0}}), Error);
}

TEST(PrimalCoordinates, GaussianRoundTrip) {
  const auto space = gaussian_space();
  Random rng(3);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector theta = random_gaussian_theta(rng);
    const auto r = primal_coordinates(space, dual_coordinates(space, theta));
    worst = std::max(worst, relative_error(r.point, theta));
    EXPECT_LE(r.residual, space.settings().tolerance);
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(PrimalCoordinates, BinomialMidpoint) {
  const DuallyFlatSpace space(binomial_ef_oracle());
  const auto r = primal_coordinates(space, Vector::Constant(1, 0.5));
  EXPECT_NEAR(r.point[0], 0.0, 1e-10);
  EXPECT_NEAR(primal_coordinates(space, Vector::Constant(1, 0.9)).point[0], std::log(9.0), 1e-9);
}

TEST(PrimalCoordinates, BinomialOutsideImage) {
  const DuallyFlatSpace space(binomial_ef_oracle());
  for (double eta : {1.5, -0.2, 2.0}) {
    try {
      (void)primal_coordinates(space, Vector::Constant(1, eta));
      FAIL() << "eta = " << eta;
    } catch (const InversionError &e) {
      EXPECT_EQ(e.code(), ErrorCode::NoSolution);
      EXPECT_GT(e.residual(), 0.0);
    }
  }
}

TEST(PrimalCoordinates, MixtureSpaceClampsNearBoundary) {
  const auto family = mcig::testing::two_gaussian_family();
  const auto g = build_mc_mixture_generator(
      family, draw_sample_set(mixture_proposal(family, Vector::Constant(1, 0.5)), 2000, 1, family));
  const DuallyFlatSpace space(g);
  // Round trip in the interior.
  const Vector eta = Vector::Constant(1, 0.3);
  const auto r = primal_coordinates(space, g->gradient(eta));
  EXPECT_FALSE(r.clamped);
  EXPECT_NEAR(r.point[0], 0.3, 1e-8);
  // A gradient value that belongs beyond the boundary margin is clamped.
  const Vector far = g->gradient(Vector::Constant(1, 1e-11));
  const auto c = primal_coordinates(space, far);
  EXPECT_TRUE(c.clamped);
  EXPECT_GE(c.point[0], space.settings().boundary_margin * 0.999);
}

TEST(PrimalCoordinates, McExponentialRoundTrip) {
  const auto ef = ExponentialFamily::gaussian();
  const auto g = build_mc_exponential_generator(
      ef, draw_sample_set(Proposal::uniform(-12, 12), 1000, 3, ef));
  const DuallyFlatSpace space(g);
  Random rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector theta = random_gaussian_theta(rng);
    const auto r = primal_coordinates(space, dual_coordinates(space, theta));
    EXPECT_LE((r.point - theta).norm(), 1e-8 * (1 + theta.norm()));
  }
}

TEST(Geodesic, Endpoints) {
  const auto space = gaussian_space();
  const Vector p = mcig::testing::gaussian_theta(0, 1), q = mcig::testing::gaussian_theta(1.5, 0.6);
  for (auto kind : {GeodesicKind::Primal, GeodesicKind::Dual}) {
    const auto a = geodesic(space, p, q, 0.0, kind);
    const auto b = geodesic(space, p, q, 1.0, kind);
    EXPECT_EQ(a.primal, p);
    EXPECT_EQ(b.primal, q);
    EXPECT_EQ(a.dual, dual_coordinates(space, p));
    EXPECT_EQ(b.dual, dual_coordinates(space, q));
  }
}

TEST(Geodesic, Midpoints) {
  const auto space = gaussian_space();
  const Vector p = mcig::testing::gaussian_theta(-1, 1), q = mcig::testing::gaussian_theta(1.5, 0.6);
  const auto primal = geodesic(space, p, q, 0.5, GeodesicKind::Primal);
  EXPECT_LE(relative_error(primal.primal, Vector((p + q) / 2)), 1e-15);
  const auto dual = geodesic(space, p, q, 0.5, GeodesicKind::Dual);
  const Vector mid = (dual_coordinates(space, p) + dual_coordinates(space, q)) / 2;
  EXPECT_LE(relative_error(dual.dual, mid), 1e-15);
  EXPECT_LE((dual_coordinates(space, dual.primal) - mid).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_THROW((void)geodesic(space, p, q, 1.5, GeodesicKind::Primal), Error);
}

TEST(SkewJensen, ZeroOnTheDiagonalAndSymmetricAtHalf) {
  const auto space = gaussian_space();
  const Vector p = mcig::testing::gaussian_theta(-1, 1), q = mcig::testing::gaussian_theta(1.5, 0.6);
  EXPECT_EQ(skew_jensen(space, p, p, 0.3), 0.0);
  EXPECT_NEAR(skew_jensen(space, p, q, 0.5), skew_jensen(space, q, p, 0.5), 1e-15);
  EXPECT_THROW((void)skew_jensen(space, p, q, 0.0), Error);
  EXPECT_THROW((void)skew_jensen(space, p, q, 1.0), Error);
}

TEST(SkewJensen, ErrorLinearInAlpha) {
  const auto space = gaussian_space();
  const Vector p = mcig::testing::gaussian_theta(0, 1), q = mcig::testing::gaussian_theta(1, 0.8);
  const double target = bregman_divergence(space, q, p);
  double previous = 0;
  for (double alpha : {1e-2, 1e-3, 1e-4}) {
    const double err = std::abs(skew_jensen(space, p, q, alpha) / alpha - target);
    if (previous > 0) {
      EXPECT_GE(previous / err, 5.0);
      EXPECT_LE(previous / err, 20.0);
    }
    previous = err;
  }
}

TEST(Jeffreys, ExactEqualsInnerProduct) {
  const auto space = gaussian_space();
  Random rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector p = random_gaussian_theta(rng), q = random_gaussian_theta(rng);
    const double j = jeffreys_divergence(space, p, q);
    const double inner =
        (p - q).dot(dual_coordinates(space, p) - dual_coordinates(space, q));
    EXPECT_LE(relative_error(j, inner), 1e-10);
  }
  const Vector p = mcig::testing::gaussian_theta(0, 1);
  EXPECT_EQ(jeffreys_divergence(space, p, p), 0.0);
  EXPECT_EQ(jeffreys_skew(space, p, p, 1e-3), 0.0);
}

TEST(Jeffreys, SkewSurrogateWithinOnePercent) {
  const auto space = gaussian_space();
  Random rng(7);
  int checked = 0;
  while (checked < 50) {
    const Vector p = random_gaussian_theta(rng), q = random_gaussian_theta(rng);
    const double exact = jeffreys_divergence(space, p, q);
    if (exact < 0.1)
      continue;
    EXPECT_LE(std::abs(jeffreys_skew(space, p, q, 1e-3) - exact), 0.01 * exact);
    ++checked;
  }
  const Vector p = mcig::testing::gaussian_theta(0, 1), q = mcig::testing::gaussian_theta(1, 1);
  EXPECT_THROW((void)jeffreys_skew(space, p, q, 0.6), Error);
}

TEST(DualPotential, DualDivergenceSwapsArguments) {
  const auto space = gaussian_space();
  Random rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const Vector t1 = random_gaussian_theta(rng), t2 = random_gaussian_theta(rng);
    const double dual = dual_bregman_divergence(space, dual_coordinates(space, t1),
                                                dual_coordinates(space, t2));
    EXPECT_LE(relative_error(dual, bregman_divergence(space, t2, t1)), 1e-8);
  }
  // F* of the standard normal is minus its differential entropy.
  const double entropy = 0.5 * std::log(2 * M_PI * M_E);
  EXPECT_NEAR(dual_potential(space, Vector{{0.0, 1.0}}), -entropy, 1e-10);
}

TEST(Crouzeix, OracleSpaces) {
  const auto space = gaussian_space();
  Random rng(9);
  for (int trial = 0; trial < 30; ++trial)
    EXPECT_LE(crouzeix_deviation(space, random_gaussian_theta(rng)), 1e-10);
  const DuallyFlatSpace binom(binomial_ef_oracle());
  EXPECT_LE(crouzeix_deviation(binom, Vector::Zero(1)), 1e-12);
}

TEST(Crouzeix, McExponential) {
  const auto ef = ExponentialFamily::gaussian();
  const DuallyFlatSpace space(build_mc_exponential_generator(
      ef, draw_sample_set(Proposal::uniform(-12, 12), 1000, 31, ef)));
  Random rng(10);
  for (int trial = 0; trial < 20; ++trial)
    EXPECT_LE(crouzeix_deviation(space, random_gaussian_theta(rng)), 1e-8);
}

TEST(Properties, LinearityOfMixtureGenerators) {
  const auto family = mcig::testing::three_kind_family();
  const Proposal q = uniform_mixture_proposal(family);
  const GeneratorPtr g1 = build_mc_mixture_generator(family, draw_sample_set(q, 300, 1, family));
  const GeneratorPtr g2 = build_mc_mixture_generator(family, draw_sample_set(q, 300, 2, family));
  const auto combo = std::make_shared<LinearCombinationGenerator>(
      std::vector<std::pair<double, GeneratorPtr>>{{0.7, g1}, {2.5, g2}});
  const DuallyFlatSpace s1(g1), s2(g2), sc(combo);
  for (std::uint64_t i = 0; i < 50; ++i) {
    VariateStream st(1, i);
    const Vector a = random_simplex_point(st, 2, 0.1), b = random_simplex_point(st, 2, 0.1);
    const double expected = 0.7 * bregman_divergence(s1, a, b) + 2.5 * bregman_divergence(s2, a, b);
    EXPECT_LE(relative_error(bregman_divergence(sc, a, b), expected), 1e-12);
  }
}

TEST(Properties, KlEqualsBregmanOfNegentropy) {
  const auto family = mcig::testing::two_gaussian_family();
  const auto oracle = mixture_negentropy_oracle(family);
  const DuallyFlatSpace exact(oracle);
  const Vector a = Vector::Constant(1, 0.3), b = Vector::Constant(1, 0.8);
  const double kl = oracle->kl(a, b);
  EXPECT_NEAR(bregman_divergence(exact, a, b), kl, 1e-6);
  // The MC divergence approaches it as m grows.
  const Proposal q = mixture_proposal(family, Vector::Constant(1, 0.5));
  double err_small = 0, err_large = 0;
  for (Seed seed = 1; seed <= 5; ++seed) {
    err_small += std::abs(
        bregman_divergence(DuallyFlatSpace(build_mc_mixture_generator(
                               family, draw_sample_set(q, 100, seed, family))),
                           a, b) -
        kl);
    err_large += std::abs(
        bregman_divergence(DuallyFlatSpace(build_mc_mixture_generator(
                               family, draw_sample_set(q, 100000, seed, family))),
                           a, b) -
        kl);
  }
  EXPECT_LT(err_large, err_small);
  EXPECT_LT(err_large / 5, 0.02 * kl);
}
