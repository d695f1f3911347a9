#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "conceptx/error.hpp"
#include "conceptx/numeric.hpp"
#include "conceptx/parallel.hpp"
#include "conceptx/rng.hpp"

using namespace conceptx;

TEST(CompensatedSum, RecoversSmallTermsLostByNaiveSummation) {
  std::vector<double> xs{1.0, 1e100, 1.0, -1e100};
  double naive = 0.0;
  for (double x : xs) naive += x;
  EXPECT_EQ(naive, 0.0);
  EXPECT_EQ(compensated_sum(xs), 2.0);
}

TEST(CompensatedSum, ManyTenthsSumToExactlyOneHundredThousand) {
  CompensatedSum s;
  for (int i = 0; i < 1000000; ++i) s += 0.1;
  EXPECT_EQ(s.value(), 100000.0);
}

TEST(CompensatedSum, MergeMatchesSequentialAddWithinRounding) {
  Rng rng(7);
  std::vector<double> xs(1000);
  for (auto& x : xs) x = rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(-8.0, 8.0));
  CompensatedSum whole, left, right;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    whole.add(xs[i]);
    (i < 500 ? left : right).add(xs[i]);
  }
  left.merge(right);
  EXPECT_NEAR(left.value(), whole.value(), 1e-12 * std::fabs(whole.value()) + 1e-300);
}

TEST(Vectors, DotNormAndNormalize) {
  const std::vector<double> a{3.0, 4.0};
  const std::vector<double> b{1.0, 0.0};
  EXPECT_DOUBLE_EQ(dot(a, b), 3.0);
  EXPECT_DOUBLE_EQ(norm(a), 5.0);
  const auto u = normalized(a);
  EXPECT_DOUBLE_EQ(u[0], 0.6);
  EXPECT_DOUBLE_EQ(u[1], 0.8);
  EXPECT_TRUE(is_unit(u));
  EXPECT_FALSE(is_unit(a));
}

TEST(Vectors, ErrorsOnMismatchAndZero) {
  const std::vector<double> a{1.0, 2.0};
  const std::vector<double> b{1.0};
  EXPECT_THROW(dot(a, b), ValidationError);
  const std::vector<double> z{0.0, 0.0};
  EXPECT_THROW(normalized(z), ValidationError);
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(format_double(0.1 + 0.2), "0.30000000000000004");
  EXPECT_EQ(format_fixed(1.23456, 2), "1.23");
  EXPECT_EQ(format_fixed(-0.0001, 2), "0.00");
}

TEST(Errors, ParseErrorCarriesLine) {
  const ParseError e(7, "bad");
  EXPECT_EQ(e.line(), 7u);
  EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos);
  const SamplingError s("cap", 0.001);
  EXPECT_DOUBLE_EQ(s.acceptance_rate(), 0.001);
}

TEST(ParallelFor, VisitsEveryIndexOnceForAnyThreadCount) {
  for (unsigned threads : {1u, 2u, 3u, 8u, 64u}) {
    std::vector<std::atomic<int>> hits(37);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  parallel_for(0, 8, [](std::size_t) { FAIL(); });
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  try {
    parallel_for(20, 4, [](std::size_t i) {
      if (i == 5 || i == 13) throw std::runtime_error("at " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "at 5");
  }
}
