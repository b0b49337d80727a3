#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "rebuttal/agreement.hpp"
#include "rebuttal/errors.hpp"

using namespace rebuttal;

namespace {

std::vector<double> as_double(const std::vector<int>& v) { return {v.begin(), v.end()}; }

void expect_opt_near(std::optional<double> got, std::optional<double> want, double tol) {
  ASSERT_EQ(got.has_value(), want.has_value());
  if (want) EXPECT_NEAR(*got, *want, tol);
}

}  // namespace

TEST(Binning, CoarseExamples) {
  EXPECT_EQ(coarse_tier(7), CoarseTier::kGood);
  EXPECT_EQ(coarse_tier(3), CoarseTier::kUnconvincing);
  EXPECT_EQ(coarse_tier(10), CoarseTier::kExcellent);
  EXPECT_EQ(coarse_tier(0), CoarseTier::kUnconvincing);
  EXPECT_EQ(coarse_tier(4), CoarseTier::kAcceptable);
}

TEST(Binning, FineExamples) {
  EXPECT_EQ(fine_bin(1), fine_bin(2));
  EXPECT_NE(fine_bin(5), fine_bin(4));
  EXPECT_NE(fine_bin(5), fine_bin(6));
  EXPECT_EQ(fine_bin(0), 0);
}

TEST(Binning, ExhaustiveAgainstOracle) {
  std::set<int> bins;
  for (int s = 0; s <= 10; ++s) {
    EXPECT_EQ(static_cast<int>(coarse_tier(s)), oracle::coarse(s)) << s;
    EXPECT_EQ(fine_bin(s), oracle::fine(s)) << s;
    bins.insert(fine_bin(s));
  }
  // {3,4} straddles the 1-3 / 4-6 tier boundary; it is the only such bin
  std::set<std::pair<int, int>> straddling;
  for (int s = 0; s <= 10; ++s) {
    for (int t = 0; t <= 10; ++t) {
      if (fine_bin(s) == fine_bin(t) && coarse_tier(s) != coarse_tier(t)) straddling.insert({s, t});
    }
  }
  EXPECT_EQ(straddling, (std::set<std::pair<int, int>>{{3, 4}, {4, 3}}));
  EXPECT_EQ(bins.size(), static_cast<std::size_t>(kFineBinCount));
  EXPECT_EQ(kFineBinCount, 7);
  EXPECT_THROW(coarse_tier(-1), Error);
  EXPECT_THROW(fine_bin(11), Error);
}

TEST(Agreement, PerfectLinear) {
  const std::vector<int> h = {1, 2, 3}, m = {2, 4, 6};
  auto d = agreement_metrics(h, m);
  EXPECT_NEAR(*d.pearson, 1.0, 1e-12);
  EXPECT_NEAR(*d.spearman, 1.0, 1e-12);
  EXPECT_NEAR(*d.kendall, 1.0, 1e-12);
  EXPECT_NEAR(d.mae, 2.0, 1e-12);
}

TEST(Agreement, Identical) {
  const std::vector<int> h = {1, 4, 7, 9, 2};
  auto d = agreement_metrics(h, h);
  EXPECT_EQ(d.mae, 0.0);
  EXPECT_NEAR(*d.pearson, 1.0, 1e-12);
  EXPECT_NEAR(*d.spearman, 1.0, 1e-12);
  EXPECT_NEAR(*d.kendall, 1.0, 1e-12);
  EXPECT_EQ(d.coarse_acc, 1.0);
  EXPECT_EQ(d.fine_acc, 1.0);
}

TEST(Agreement, Reversal) {
  const std::vector<int> h = {1, 2, 3}, m = {3, 2, 1};
  EXPECT_NEAR(*agreement_metrics(h, m).kendall, -1.0, 1e-12);
}

TEST(Agreement, ConstantInputIsUndefined) {
  const std::vector<int> h = {5, 5, 5}, m = {1, 2, 3};
  auto d = agreement_metrics(h, m);
  EXPECT_FALSE(d.pearson);
  EXPECT_FALSE(d.kendall);
}

TEST(Agreement, Errors) {
  const std::vector<int> a = {1, 2}, b = {1}, bad = {1, 12};
  EXPECT_THROW(agreement_metrics(a, b), Error);
  EXPECT_THROW(agreement_metrics(b, std::vector<int>{}), Error);
  EXPECT_THROW(agreement_metrics(a, bad), Error);
}

TEST(Agreement, MatchesBruteForceOnTieHeavyVectors) {
  std::mt19937_64 gen(21);
  std::uniform_int_distribution<int> narrow(3, 7), wide(0, 10);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> h(100), m(100);
    for (int i = 0; i < 100; ++i) {
      h[i] = trial % 2 ? narrow(gen) : wide(gen);
      m[i] = narrow(gen);
    }
    auto d = agreement_metrics(h, m);
    const auto hx = as_double(h), mx = as_double(m);
    EXPECT_NEAR(d.mae, oracle::mae(hx, mx), 1e-9);
    expect_opt_near(d.pearson, oracle::pearson(hx, mx), 1e-9);
    expect_opt_near(d.spearman, oracle::spearman(hx, mx), 1e-9);
    expect_opt_near(d.kendall, oracle::kendall(hx, mx), 1e-9);
    double c = 0, f = 0;
    for (int i = 0; i < 100; ++i) {
      c += oracle::coarse(h[i]) == oracle::coarse(m[i]);
      f += oracle::fine(h[i]) == oracle::fine(m[i]);
    }
    EXPECT_NEAR(d.coarse_acc, c / 100, 1e-12);
    EXPECT_NEAR(d.fine_acc, f / 100, 1e-12);
  }
}

TEST(Agreement, AffineInvarianceProperty) {
  std::mt19937_64 gen(22);
  std::uniform_int_distribution<int> score(0, 10);
  std::uniform_real_distribution<double> scale(0.1, 5.0), shift(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(30), y(30);
    for (int i = 0; i < 30; ++i) {
      x[i] = score(gen);
      y[i] = score(gen);
    }
    const double a = scale(gen), b = shift(gen);
    std::vector<double> tx;
    for (double v : x) tx.push_back(a * v + b);
    expect_opt_near(pearson(tx, y), pearson(x, y), 1e-9);
    expect_opt_near(spearman(tx, y), spearman(x, y), 1e-9);
    expect_opt_near(kendall_tau_b(tx, y), kendall_tau_b(x, y), 1e-9);
  }
}

TEST(Agreement, RangesProperty) {
  std::mt19937_64 gen(23);
  std::uniform_int_distribution<int> score(0, 10);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> h(20), m(20);
    for (int i = 0; i < 20; ++i) {
      h[i] = score(gen);
      m[i] = score(gen);
    }
    auto d = agreement_metrics(h, m);
    for (auto v : {d.pearson, d.spearman, d.kendall}) {
      if (v) {
        EXPECT_GE(*v, -1.0);
        EXPECT_LE(*v, 1.0);
      }
    }
    EXPECT_GE(d.mae, 0.0);
  }
}

TEST(AgreementReport, AverageAndZeroBin) {
  std::vector<DimensionScores> dims = {{"attitude", {1, 2, 3, 4}, {1, 2, 4, 3}},
                                       {"clarity", {0, 5, 6, 9}, {1, 5, 7, 9}}};
  auto report = build_agreement_report(dims);
  EXPECT_TRUE(report.zero_bin_used);
  ASSERT_EQ(report.dimensions.size(), 2u);
  double sum = 0;
  int count = 0;
  for (const auto& d : report.dimensions) {
    for (auto v : {d.pearson, d.spearman}) {
      sum += *v;
      ++count;
    }
    sum += d.fine_acc;
    ++count;
  }
  EXPECT_NEAR(*report.average(), sum / count, 1e-12);
  dims[1].human.pop_back();
  dims[1].model.pop_back();
  EXPECT_THROW(build_agreement_report(dims), Error);
  EXPECT_NE(render_table(build_agreement_report({dims[0]})).find("attitude"), std::string::npos);
}
