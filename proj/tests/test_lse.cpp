#include "mcig/error.hpp"
#include "mcig/lse.hpp"

#include "support.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <limits>
#include <vector>

using namespace mcig;

TEST(Lse0p, EmptyInputIsExactlyZero) { EXPECT_EQ(lse0p({}), 0.0); }

TEST(Lse0p, SingleZeroIsLogTwo) {
  const std::vector<double> x{0.0};
  EXPECT_DOUBLE_EQ(lse0p(x), std::log(2.0));
}

TEST(Lse0p, LargeArgumentDoesNotOverflow) {
  const std::vector<double> x{1000.0};
  EXPECT_DOUBLE_EQ(lse0p(x), 1000.0);
  const std::vector<double> y{-1000.0, -2000.0};
  EXPECT_EQ(lse0p(y), 0.0);
}

TEST(Lse0p, RejectsNonFiniteInput) {
  const std::vector<double> inf{std::numeric_limits<double>::infinity()};
  const std::vector<double> nan{std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW((void)lse0p(inf), Error);
  EXPECT_THROW((void)lse0p(nan), Error);
  const std::vector<double> neg{-std::numeric_limits<double>::infinity()};
  EXPECT_EQ(lse0p(neg), 0.0);
}

TEST(Lse0pGrad, KnownValues) {
  const std::vector<double> one{0.0};
  EXPECT_DOUBLE_EQ(lse0p_grad(one)[0], 0.5);
  const std::vector<double> two{0.0, 0.0};
  const Vector g = lse0p_grad(two);
  EXPECT_DOUBLE_EQ(g[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(g[1], 1.0 / 3.0);
  EXPECT_LT(g.sum(), 1.0);
}

TEST(Lse0pGrad, EntriesInUnitIntervalSummingBelowOne) {
  mcig::testing::Random rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector x = rng.uniform_vector(rng.integer(1, 6), -10, 10);
    const Vector g = lse0p_grad(std::span<const double>(x.data(), x.size()));
    EXPECT_GT(g.minCoeff(), 0.0);
    EXPECT_LT(g.maxCoeff(), 1.0);
    EXPECT_LT(g.sum(), 1.0);
  }
}

TEST(Lse0pHess, PositiveDefiniteOnRandomInputs) {
  mcig::testing::Random rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector x = rng.uniform_vector(rng.integer(1, 4), -10, 10);
    const Matrix h = lse0p_hess(std::span<const double>(x.data(), x.size()));
    EXPECT_EQ((h - h.transpose()).cwiseAbs().maxCoeff(), 0.0);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0) << "x = " << x.transpose();
  }
}

TEST(Lse0pHess, MatchesFiniteDifferencesOfGradient) {
  const Vector x{{0.3, -1.2, 2.0}};
  const Matrix h = lse0p_hess(std::span<const double>(x.data(), x.size()));
  const double step = 1e-6;
  for (Index j = 0; j < 3; ++j) {
    Vector up = x, down = x;
    up[j] += step;
    down[j] -= step;
    const Vector fd = (lse0p_grad(std::span<const double>(up.data(), 3)) -
                       lse0p_grad(std::span<const double>(down.data(), 3))) /
                      (2 * step);
    EXPECT_LT((fd - h.col(j)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(LogSumExp, ShiftInvariant) {
  const std::vector<double> x{-800.0, -801.0};
  EXPECT_NEAR(log_sum_exp(x), -800.0 + std::log1p(std::exp(-1.0)), 1e-12);
  EXPECT_EQ(log_sum_exp({}), -std::numeric_limits<double>::infinity());
}

TEST(Log1mexp, BothBranches) {
  EXPECT_NEAR(log1mexp(1e-10), std::log(1e-10), 1e-9);
  EXPECT_NEAR(log1mexp(5.0), std::log(1.0 - std::exp(-5.0)), 1e-15);
  EXPECT_EQ(log1mexp(std::numeric_limits<double>::infinity()), 0.0);
  EXPECT_THROW((void)log1mexp(-1.0), Error);
}
