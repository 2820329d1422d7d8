#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "jamming/rng.hpp"
#include "support.hpp"

using namespace jamming;
using testing_support::chi_square_p_value;
using testing_support::moments;

namespace {

double binomial_pmf(std::uint64_t n, double p, std::uint64_t k) {
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return std::exp(std::lgamma(nd + 1) - std::lgamma(kd + 1) - std::lgamma(nd - kd + 1) + kd * std::log(p) +
                  (nd - kd) * std::log1p(-p));
}

double poisson_pmf(std::uint64_t k, double mean) {
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1));
}

std::vector<std::uint64_t> binomial_counts(std::uint64_t n, double p, int draws, std::uint64_t seed) {
  StreamEngine eng(RngSpec{seed, 0});
  std::vector<std::uint64_t> counts(n + 1, 0);
  for (int i = 0; i < draws; ++i) ++counts[binomial(eng, n, p)];
  return counts;
}

}  // namespace

TEST(StreamEngine, SameSpecSameStream) {
  StreamEngine a(RngSpec{42, 7});
  StreamEngine b(RngSpec{42, 7});
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(StreamEngine, DifferentTrialsDiffer) {
  std::set<std::uint64_t> first;
  for (std::uint64_t t = 0; t < 10000; ++t) {
    StreamEngine e(RngSpec{1, t});
    first.insert(e());
  }
  EXPECT_EQ(first.size(), 10000u);
  StreamEngine x(RngSpec{1, 0});
  StreamEngine y(RngSpec{2, 0});
  EXPECT_NE(x(), y());
}

TEST(StreamEngine, ForkDoesNotAdvanceParent) {
  StreamEngine a(RngSpec{3, 3});
  StreamEngine b(RngSpec{3, 3});
  auto child = a.fork(5);
  EXPECT_EQ(a(), b());
  auto child2 = b.fork(5);
  EXPECT_EQ(child(), child2());
  EXPECT_NE(a.fork(1)(), a.fork(2)());
}

TEST(Uniform, UnitIntervalAndMoments) {
  StreamEngine eng(RngSpec{9, 0});
  std::vector<double> xs(200000);
  for (auto& x : xs) {
    x = uniform01(eng);
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
  const auto m = moments(xs);
  EXPECT_NEAR(m.mean, 0.5, 4 * m.se_mean);
  EXPECT_NEAR(m.variance, 1.0 / 12.0, 4 * m.se_variance);
}

TEST(Uniform, IndexIsUnbiased) {
  StreamEngine eng(RngSpec{10, 0});
  std::vector<std::uint64_t> counts(7, 0);
  for (int i = 0; i < 700000; ++i) {
    const auto k = uniform_index(eng, 7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  EXPECT_GT(chi_square_p_value(counts, std::vector<double>(7, 1.0 / 7.0)), 1e-3);
  EXPECT_EQ(uniform_index(eng, 1), 0u);
}

TEST(Exponential, MeanIsInverseRate) {
  StreamEngine eng(RngSpec{11, 0});
  std::vector<double> xs(200000);
  for (auto& x : xs) x = exponential(eng, 4.0);
  const auto m = moments(xs);
  EXPECT_NEAR(m.mean, 0.25, 4 * m.se_mean);
  EXPECT_NEAR(m.variance, 1.0 / 16.0, 4 * m.se_variance);
  EXPECT_THROW(exponential(eng, 0.0), std::invalid_argument);
}

TEST(Binomial, Degenerate) {
  StreamEngine eng(RngSpec{1, 1});
  EXPECT_EQ(binomial(eng, 0, 0.3), 0u);
  EXPECT_EQ(binomial(eng, 17, 0.0), 0u);
  EXPECT_EQ(binomial(eng, 17, 1.0), 17u);
  EXPECT_THROW(binomial(eng, 5, -0.1), std::invalid_argument);
  EXPECT_THROW(binomial(eng, 5, 1.1), std::invalid_argument);
}

// Exact law checked by chi-square on both sampling branches and the p > 1/2
// reflection.
class BinomialLaw : public ::testing::TestWithParam<std::pair<std::uint64_t, double>> {};

TEST_P(BinomialLaw, MatchesPmf) {
  const auto [n, p] = GetParam();
  const auto counts = binomial_counts(n, p, 200000, 77);
  std::vector<double> probs(n + 1);
  for (std::uint64_t k = 0; k <= n; ++k) probs[k] = binomial_pmf(n, p, k);
  EXPECT_GT(chi_square_p_value(counts, probs), 1e-3);
}

INSTANTIATE_TEST_SUITE_P(Branches, BinomialLaw,
                         ::testing::Values(std::pair<std::uint64_t, double>{1, 0.5},
                                           std::pair<std::uint64_t, double>{20, 0.3},
                                           std::pair<std::uint64_t, double>{20, 0.85},
                                           std::pair<std::uint64_t, double>{200, 0.4},
                                           std::pair<std::uint64_t, double>{1000, 0.07},
                                           std::pair<std::uint64_t, double>{5000, 0.5},
                                           std::pair<std::uint64_t, double>{799, 0.00083}));

TEST(Binomial, LargeNMoments) {
  StreamEngine eng(RngSpec{12, 0});
  std::vector<std::uint64_t> xs(100000);
  for (auto& x : xs) x = binomial(eng, 1000000, 0.3);
  const auto m = moments(xs);
  EXPECT_NEAR(m.mean, 300000.0, 4 * m.se_mean);
  EXPECT_NEAR(m.variance, 210000.0, 4 * m.se_variance);
}

TEST(Poisson, MatchesPmf) {
  for (const double mean : {0.5, 5.0, 45.0, 800.0}) {
    StreamEngine eng(RngSpec{13, static_cast<std::uint64_t>(mean * 10)});
    const std::size_t cap = static_cast<std::size_t>(mean + 20 * std::sqrt(mean) + 20);
    std::vector<std::uint64_t> counts(cap + 1, 0);
    for (int i = 0; i < 200000; ++i) {
      const auto k = poisson(eng, mean);
      ASSERT_LE(k, cap);
      ++counts[k];
    }
    std::vector<double> probs(cap + 1);
    for (std::size_t k = 0; k <= cap; ++k) probs[k] = poisson_pmf(k, mean);
    EXPECT_GT(chi_square_p_value(counts, probs), 1e-3) << "mean " << mean;
  }
}

TEST(Poisson, ZeroMeanAndErrors) {
  StreamEngine eng(RngSpec{14, 0});
  EXPECT_EQ(poisson(eng, 0.0), 0u);
  EXPECT_THROW(poisson(eng, -1.0), std::invalid_argument);
}
