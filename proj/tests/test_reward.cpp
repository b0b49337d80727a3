#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rebuttal/errors.hpp"
#include "rebuttal/reward.hpp"

using namespace rebuttal;

namespace {

double population_std(const std::vector<double>& v) {
  const double m = oracle::mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

TEST(Reward, WorkedComposite) {
  auto b = composite_reward(1, {8, 8}, 9, 7);
  EXPECT_NEAR(b.total, 0.1 * 1 + 0.3 * 0.8 + 0.3 * 0.9 + 0.3 * 0.7, 1e-12);
  EXPECT_NEAR(b.total, 0.82, 1e-12);
  EXPECT_NEAR(b.think, 0.8, 1e-12);
}

TEST(Reward, MinimumAndMaximum) {
  EXPECT_NEAR(composite_reward(0, {1, 1}, 1, 1).total, 0.3 * 0.1 * 3, 1e-12);
  EXPECT_NEAR(composite_reward(0, {1, 1}, 1, 1).total, 0.09, 1e-12);
  EXPECT_NEAR(composite_reward(1, {10, 10}, 10, 10).total, 1.0, 1e-12);
}

TEST(Reward, RejectsBadComponents) {
  EXPECT_THROW(composite_reward(2, {5, 5}, 5, 5), Error);
  EXPECT_THROW(composite_reward(1, {0.5, 5}, 5, 5), Error);
  EXPECT_THROW(composite_reward(1, {5, 5}, 11, 5), Error);
  EXPECT_THROW(composite_reward(1, {5, 5}, 5, 5, RewardWeights{0.5, 0.5, 0.5, 0.5}), Error);
}

TEST(Reward, CompositeMatchesWeightedSumProperty) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> score(1.0, 10.0);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < 10000; ++i) {
    const int f = coin(gen) ? 1 : 0;
    const double a = score(gen), s = score(gen), r = score(gen), d = score(gen);
    const auto b = composite_reward(f, {a, s}, r, d);
    ASSERT_NEAR(b.total, oracle::composite(f, a, s, r, d), 1e-9);
    ASSERT_GE(b.total, 0.0);
    ASSERT_LE(b.total, 1.0);
  }
}

TEST(Advantages, WorkedExample) {
  const std::vector<double> r = {1, 2, 3};
  const auto a = group_advantages(r);
  const double expect = 1.0 / (std::sqrt(2.0 / 3.0) + 1e-8);
  EXPECT_NEAR(a[0], -expect, 1e-12);
  EXPECT_NEAR(a[1], 0.0, 1e-12);
  EXPECT_NEAR(a[2], expect, 1e-12);
  EXPECT_NEAR(a[2], 1.224744, 1e-6);
}

TEST(Advantages, ConstantGroupIsZero) {
  const std::vector<double> r = {5, 5, 5, 5, 5};
  EXPECT_EQ(group_advantages(r), std::vector<double>(5, 0.0));
}

TEST(Advantages, GroupTooSmall) {
  const std::vector<double> r = {1};
  EXPECT_THROW(group_advantages(r), Error);
}

TEST(Advantages, ZeroMeanUnitStdProperty) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> reward(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 10);
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> r(size(gen));
    for (auto& x : r) x = reward(gen);
    const auto a = group_advantages(r);
    ASSERT_LT(std::fabs(oracle::mean(a)), 1e-9);
    const double s = population_std(r);
    // the 1e-8 in the denominator shrinks the std to s/(s+1e-8)
    ASSERT_NEAR(population_std(a), s / (s + 1e-8), 1e-9);
    if (s >= 0.01) ASSERT_NEAR(population_std(a), 1.0, 1e-6);
    const auto ref = oracle::advantages(r);
    for (std::size_t k = 0; k < r.size(); ++k) ASSERT_NEAR(a[k], ref[k], 1e-9);
    ASSERT_EQ(select_best_of_n(a), select_best_of_n(r));
  }
}

TEST(Surrogate, WorkedValues) {
  EXPECT_NEAR(clipped_surrogate_term(1.5, 1.0, 0.2), oracle::clipped(1.5, 1.0, 0.2), 1e-12);
  EXPECT_NEAR(clipped_surrogate_term(1.5, 1.0, 0.2), 1.2, 1e-12);
  EXPECT_NEAR(clipped_surrogate_term(0.5, -1.0, 0.2), -0.8, 1e-12);
  EXPECT_NEAR(clipped_surrogate_term(1.0, 0.37), 0.37, 1e-12);
  EXPECT_NEAR(clipped_surrogate_term(1.0, -2.5), -2.5, 1e-12);
}

TEST(Surrogate, PessimismProperty) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> ratio(0.0, 3.0), adv(-3.0, 3.0);
  for (int i = 0; i < 10000; ++i) {
    const double r = ratio(gen), a = adv(gen);
    const double t = clipped_surrogate_term(r, a);
    // never above either the raw or the clipped term
    ASSERT_LE(t, r * a + 1e-12) << r << " " << a;
    ASSERT_LE(t, std::clamp(r, 0.8, 1.2) * a + 1e-12) << r << " " << a;
    ASSERT_NEAR(t, oracle::clipped(r, a, 0.2), 1e-12);
  }
}

TEST(Kl, WorkedValues) {
  EXPECT_EQ(kl_penalty(-1.3, -1.3), 0.0);
  // delta = logp_ref - logp
  EXPECT_NEAR(kl_penalty(0.0, 0.1), oracle::k3(0.1), 1e-12);
  EXPECT_NEAR(kl_penalty(0.0, 0.1), 0.0051709, 1e-7);
}

TEST(Kl, NonNegativeProperty) {
  std::mt19937_64 gen(14);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    const double delta = d(gen);
    const double k = kl_penalty(0.0, delta);
    ASSERT_GE(k, 0.0);
    if (delta != 0.0) ASSERT_GT(k, 0.0);
    ASSERT_NEAR(k, oracle::k3(delta), 1e-9 * std::max(1.0, oracle::k3(delta)));
  }
}

TEST(Objective, CombinesTerms) {
  const double lp = -1.0, old = -1.2, ref = -0.9, a = 0.7;
  const double expect = oracle::clipped(std::exp(lp - old), a, 0.2) - 0.001 * oracle::k3(ref - lp);
  EXPECT_NEAR(grpo_objective_term(lp, old, ref, a), expect, 1e-12);
}

TEST(BestOfN, ArgmaxAndTies) {
  const std::vector<double> a = {0.5, 0.9, 0.7};
  EXPECT_EQ(select_best_of_n(a), 1u);
  const std::vector<double> b = {0.9, 0.9};
  EXPECT_EQ(select_best_of_n(b), 0u);
  EXPECT_THROW(select_best_of_n(std::vector<double>{}), Error);
}

TEST(BestOfN, AffineInvarianceProperty) {
  std::mt19937_64 gen(15);
  std::uniform_int_distribution<int> grid(0, 100), size(1, 8);
  std::uniform_real_distribution<double> scale(0.1, 10.0), shift(-5.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> t(size(gen));
    for (auto& x : t) x = grid(gen) / 100.0;
    const double s = scale(gen), c = shift(gen);
    std::vector<double> u;
    for (double x : t) u.push_back(s * x + c);
    ASSERT_EQ(select_best_of_n(t), select_best_of_n(u));
  }
}

TEST(CandidateGroup, SizesAgree) {
  std::vector<Candidate> cs;
  for (int i = 1; i <= 5; ++i) cs.push_back({"c", composite_reward(1, {i + 1.0, 5}, 5, 5)});
  auto g = make_candidate_group("p", cs);
  EXPECT_EQ(g.size(), 5u);
  EXPECT_EQ(g.advantages.size(), 5u);
  EXPECT_EQ(select_best_of_n(g), 4u);
}
