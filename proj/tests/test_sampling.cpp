#include "mcig/error.hpp"
#include "mcig/sampling.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mcig;

TEST(UniformMixtureProposal, IdenticalComponentsGiveTheComponent) {
  const auto p = ComponentDensity::laplace(1, 2);
  const Proposal q = uniform_mixture_proposal(MixtureFamily::unchecked({p, p}));
  for (double x : {-4.0, 0.0, 1.0, 9.0})
    EXPECT_NEAR(q.log_density(x), p.log_density(x), 1e-15);
}

TEST(UniformMixtureProposal, GaussianLaplaceAtZero) {
  const MixtureFamily family({ComponentDensity::gaussian(-2, 1), ComponentDensity::laplace(2, 1)});
  const Proposal q = uniform_mixture_proposal(family);
  const double expected = 0.5 * (mcig::testing::normal_pdf(0, -2, 1) + mcig::testing::laplace_pdf(0, 2, 1));
  EXPECT_NEAR(std::exp(q.log_density(0.0)), expected, 1e-16);
}

TEST(UniformMixtureProposal, EqualThirdsForThreeComponents) {
  const auto family = mcig::testing::three_kind_family();
  const Proposal q = uniform_mixture_proposal(family);
  for (double x : {-3.0, 0.5, 2.0}) {
    const double expected = (mcig::testing::normal_pdf(x, -2, 1) + mcig::testing::laplace_pdf(x, 0, 1) +
                             mcig::testing::cauchy_pdf(x, 2, 1)) /
                            3.0;
    EXPECT_NEAR(std::exp(q.log_density(x)), expected, 1e-15);
  }
  // Ancestral sampling hits each component about a third of the time.
  int left = 0;
  const int n = 30000;
  for (int i = 0; i < n; ++i) {
    VariateStream s(5, static_cast<std::uint64_t>(i));
    if (q.sample(s) < -1.0)
      ++left;
  }
  // P(x < -1) = (Phi(1) + 0.5 e^{-1} + (1/2 + atan(-3)/pi)) / 3.
  const double p = (0.8413447460685429 + 0.5 * std::exp(-1.0) + 0.5 + std::atan(-3.0) / M_PI) / 3;
  EXPECT_NEAR(static_cast<double>(left) / n, p, 0.01);
}

TEST(DrawSampleSet, Deterministic) {
  const auto family = mcig::testing::two_gaussian_family();
  const Proposal q = uniform_mixture_proposal(family);
  const SampleSet a = draw_sample_set(q, 500, 9, family);
  const SampleSet b = draw_sample_set(q, 500, 9, family);
  EXPECT_TRUE(a == b);
  const SampleSet c = draw_sample_set(q, 500, 10, family);
  EXPECT_FALSE(a == c);
}

TEST(DrawSampleSet, ZeroSizeIsAPrecondition) {
  const auto family = mcig::testing::two_gaussian_family();
  try {
    (void)draw_sample_set(uniform_mixture_proposal(family), 0, 1, family);
    FAIL() << "expected an error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::Precondition);
  }
}

TEST(DrawSampleSet, StandardNormalMatchesReferenceStream) {
  const Proposal q = Proposal::from_density(ComponentDensity::gaussian(0, 1));
  const SampleSet s = draw_sample_set(q, 10, 42, ExponentialFamily::gaussian());
  const double expected[] = {0.41471975043153014, -2.128686625069507,  0.18723098867356658,
                             1.14756344850883,    -1.0723714838399718, -0.36053211717771116,
                             0.20821659182092978, 1.5310791309130838,  -2.5057693669701977,
                             1.2656774603795986};
  for (int i = 0; i < 10; ++i)
    EXPECT_DOUBLE_EQ(s.variates[i], expected[i]) << i;
  EXPECT_EQ(s.proposal_label, "gaussian(0,1)");
}

TEST(DrawSampleSet, CachesAreConsistent) {
  const auto family = mcig::testing::three_kind_family();
  const Proposal q = uniform_mixture_proposal(family);
  const SampleSet s = draw_sample_set(q, 100, 3, family);
  ASSERT_TRUE(s.is_mixture());
  const auto &cache = s.mixture_cache();
  EXPECT_EQ(cache.log_components.rows(), 3);
  EXPECT_EQ(cache.log_components.cols(), 100);
  EXPECT_EQ(cache.family_fingerprint, family.fingerprint());
  for (Index i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s.log_q[i], q.log_density(s.variates[i]));
    for (Index j = 0; j < 3; ++j)
      EXPECT_EQ(cache.log_components(j, i), family.component(j).log_density(s.variates[i]));
  }
  EXPECT_THROW((void)s.exponential_cache(), Error);

  const auto ef = ExponentialFamily::polynomial({1, 2, 3});
  const SampleSet e = draw_sample_set(Proposal::uniform(-2, 2), 50, 3, ef);
  const auto &ec = e.exponential_cache();
  for (Index i = 0; i < e.size(); ++i) {
    EXPECT_EQ(ec.statistics.col(i), ef.statistic(e.variates[i]));
    EXPECT_NEAR(e.log_q[i], -std::log(4.0), 1e-15);
  }
}

TEST(DrawSampleSet, OverflowingStatisticNamesTheVariate) {
  // exp(x) overflows for x > 709.78, which a Cauchy proposal reaches often enough.
  const ExponentialFamily ef("exp-stat", 2, [](double x) { return Vector{{x, std::exp(x)}}; },
                             [](double) { return 0.0; });
  try {
    (void)draw_sample_set(Proposal::from_density(ComponentDensity::cauchy(0, 1)), 20000, 1, ef);
    FAIL() << "expected a non-finite cache error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
    EXPECT_NE(std::string(e.what()).find("variate"), std::string::npos) << e.what();
  }
}

TEST(DrawSampleSet, ImportanceWeightsAverageToOne) {
  const auto family = mcig::testing::two_gaussian_family();
  const Proposal q = uniform_mixture_proposal(family);
  const SampleSet s = draw_sample_set(q, 100000, 77, family);
  const auto target = ComponentDensity::laplace(1, 1.5);
  double sum = 0;
  for (Index i = 0; i < s.size(); ++i)
    sum += std::exp(target.log_density(s.variates[i]) - s.log_q[i]);
  EXPECT_NEAR(sum / s.size(), 1.0, 0.02);
}

TEST(SplitSampleSet, BlocksEqualIndependentDraws) {
  const auto family = mcig::testing::three_kind_family();
  const Proposal q = uniform_mixture_proposal(family);
  const SampleSet full = draw_sample_set(q, 1001, 11, family);
  for (Index parts : {1, 2, 3, 8}) {
    const auto blocks = split_sample_set(full, parts);
    ASSERT_EQ(static_cast<Index>(blocks.size()), parts);
    for (const auto &block : blocks) {
      const SampleSet direct = draw_sample_set(q, block.size(), 11, family, block.first_index);
      EXPECT_TRUE(block == direct);
    }
    EXPECT_TRUE(concatenate_sample_sets(blocks) == full);
  }
  EXPECT_THROW((void)split_sample_set(full, 0), Error);
  EXPECT_THROW((void)split_sample_set(full, 2000), Error);
}

TEST(ConcatenateSampleSets, RejectsGaps) {
  const auto family = mcig::testing::two_gaussian_family();
  const Proposal q = uniform_mixture_proposal(family);
  const SampleSet a = draw_sample_set(q, 10, 1, family, 0);
  const SampleSet b = draw_sample_set(q, 10, 1, family, 11);
  EXPECT_THROW((void)concatenate_sample_sets({a, b}), Error);
  const SampleSet c = draw_sample_set(q, 10, 2, family, 10);
  EXPECT_THROW((void)concatenate_sample_sets({a, c}), Error);
}
