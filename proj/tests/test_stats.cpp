#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mdp/stats.hpp"

namespace {

using namespace mdp::stats;

TEST(Wilson, KnownValuesAndEdges) {
  const auto ci = wilson(10, 100);
  EXPECT_NEAR(ci.low, 0.05522914, 1e-7);
  EXPECT_NEAR(ci.high, 0.17436566, 1e-7);
  EXPECT_EQ(wilson(0, 50).low, 0.0);
  EXPECT_GT(wilson(0, 50).high, 0.0);
  EXPECT_EQ(wilson(50, 50).high, 1.0);
}

TEST(Wilson, CoverageOnBernoulliStream) {
  std::mt19937_64 gen(3);
  std::bernoulli_distribution coin(0.01);
  int covered = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    int hits = 0;
    for (int i = 0; i < 2000; ++i) hits += coin(gen);
    const auto ci = wilson(hits, 2000);
    covered += ci.low <= 0.01 && 0.01 <= ci.high;
  }
  EXPECT_GE(covered, 930);
}

TEST(Ks, NormalSampleAndShift) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  std::vector<double> x(10000);
  for (auto& v : x) v = normal(gen);
  EXPECT_LT(ks_normal(x), ks_critical_5(10000));
  for (auto& v : x) v += 0.2;
  EXPECT_GT(ks_normal(x), 0.06);
  EXPECT_NEAR(ks_normal({0.0}), 0.5, 1e-15);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
}

TEST(ParallelFor, VisitsEachIndexOnceAndRethrows) {
  std::vector<int> seen(1000, 0);
  parallel_for(1000, 8, [&](std::int64_t i) { seen[static_cast<std::size_t>(i)] += 1; });
  for (int s : seen) EXPECT_EQ(s, 1);
  EXPECT_THROW(parallel_for(100, 4, [](std::int64_t i) { if (i == 37) throw std::runtime_error("x"); }),
               std::runtime_error);
  EXPECT_GE(resolve_workers(0), 1);
  EXPECT_EQ(resolve_workers(3), 3);
}

}  // namespace
