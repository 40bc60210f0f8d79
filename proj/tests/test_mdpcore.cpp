#include <cmath>

#include <gtest/gtest.h>

#include "mdp/error.hpp"
#include "mdp/mdpcore.hpp"

namespace {

const std::vector<std::int64_t> kNs{10000, 50000, 200000, 1000000};

TEST(Schedule, AcceptsAndRejectsByExponentSign) {
  EXPECT_NO_THROW(mdp::make_schedule(0.15, 0.1, kNs));
  EXPECT_NEAR(mdp::make_schedule(0.15, 0.1, kNs).exponent_margin(), 0.1, 1e-15);
  try {
    mdp::make_schedule(0.2, 0.2, kNs);
    FAIL() << "expected rejection";
  } catch (const mdp::ScheduleInvalidError& e) {
    EXPECT_NE(std::string(e.what()).find("1/2 - 2*beta - gamma_b"), std::string::npos);
  }
  EXPECT_THROW(mdp::make_schedule(0.0, 0.1, kNs), mdp::ConfigError);
  EXPECT_THROW(mdp::make_schedule(0.1, -0.1, kNs), mdp::ConfigError);
  EXPECT_THROW(mdp::make_schedule(0.1, 0.1, {100, 50}), mdp::ConfigError);
  EXPECT_THROW(mdp::make_schedule(0.1, 0.1, kNs, 1.3), mdp::ConfigError);
}

TEST(Schedule, AcceptanceMatchesExponentSignOnGrid) {
  for (double beta = 0.05; beta < 0.3; beta += 0.03)
    for (double gb = 0.02; gb < 0.5; gb += 0.05) {
      const bool ok = 0.5 - 2 * beta - gb > 0;
      bool accepted = true;
      try {
        mdp::make_schedule(beta, gb, {1000000000, 10000000000});
      } catch (const mdp::ScheduleInvalidError&) {
        accepted = false;
      }
      EXPECT_EQ(accepted, ok) << beta << " " << gb;
    }
}

TEST(Schedule, PointValues) {
  const auto s = mdp::make_schedule(0.15, 0.1, {1000000});
  ASSERT_EQ(s.points.size(), 1u);
  EXPECT_NEAR(s.points[0].theta, 0.8741074588205833, 1e-12);
  EXPECT_EQ(s.points[0].m, 13);
  EXPECT_NEAR(s.points[0].b, std::pow(1e6, 0.1), 1e-12);
}

TEST(Schedule, PowerLawQuantitiesMoveInProvenDirections) {
  for (auto [beta, gb] : {std::pair{0.15, 0.1}, std::pair{0.15, 0.05}, std::pair{0.1, 0.2}}) {
    const auto f = mdp::make_schedule(beta, gb, {1000000, 1000000000, 1000000000000, 1000000000000000}).trends();
    EXPECT_TRUE(f.signal && f.effective_n && f.window && f.block_growth) << beta << " " << gb;
  }
}

TEST(Schedule, LogWindowRatioFallsBeforeItGrows) {
  // m(1-theta)/|log(1-theta)| ~ d^{-1/5}/|log d| has its minimum at d = e^{-5}.
  EXPECT_FALSE(mdp::make_schedule(0.15, 0.05, {10000, 50000, 200000}).trends().window_log);
  const auto late = mdp::make_schedule(0.15, 0.05, {10000000000000000, 1000000000000000000}).trends();
  EXPECT_TRUE(late.window_log);
  EXPECT_TRUE(late.all());
}

TEST(Schedule, ResidualVanishesOnlyFarOut) {
  // K_n theta^m sqrt(1-theta^2) ~ d^{-3/2} exp(-d^{-1/5}) peaks near d = 7.5^{-5},
  // beyond any n a power-law schedule reaches in 64 bits; it depends on (theta, m) only.
  EXPECT_FALSE(mdp::make_schedule(0.2, 0.05, {10000, 1000000, 100000000}).trends().residual);
  double prev = INFINITY;
  for (double d : {1e-5, 1e-6, 1e-7}) {
    const mdp::SchedulePoint p{2, 1.0 - d, 2.0, static_cast<int>(std::ceil(std::pow(d, -1.2)))};
    const double r = mdp::condition_row(p, 2.0 / 3.0).residual;
    EXPECT_LT(r, prev);
    prev = r;
  }
  EXPECT_LT(prev, 1.0);
}

TEST(Schedule, KAccessors) {
  const mdp::SchedulePoint p{100, 0.5, 2.0, 4};
  const auto r = mdp::condition_row(p, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.k_n, 4.0);
  EXPECT_NEAR(r.k_m, 0.5 + 0.25 + 0.125, 1e-15);
  EXPECT_NEAR(r.residual, 4.0 * 0.0625 * std::sqrt(0.75), 1e-15);
}

TEST(Schedule, ExplicitPointsValidated) {
  EXPECT_NO_THROW(mdp::explicit_schedule({{1000, 0.9, 2.0, 5}}));
  EXPECT_THROW(mdp::explicit_schedule({{1000, 1.0, 2.0, 5}}), mdp::ConfigError);
  EXPECT_THROW(mdp::explicit_schedule({{1000, 0.9, 1.0, 5}}), mdp::ConfigError);
  EXPECT_THROW(mdp::explicit_schedule({{1000, 0.9, 2.0, 4}}, 2.0 / 3.0, 2), mdp::ConfigError);
}

TEST(Rates, Values) {
  EXPECT_DOUBLE_EQ(mdp::rate_covariance(2, 1), 0.5);
  EXPECT_DOUBLE_EQ(mdp::rate_covariance(1, 1), 0.125);
  EXPECT_DOUBLE_EQ(mdp::rate_covariance(1, 2), 1.0 / 32);
  EXPECT_DOUBLE_EQ(mdp::rate_linear_combo(2, {0.5, 0.5}, 1), 0.5);
  EXPECT_THROW(mdp::rate_linear_combo(2, {1, -1}, 1), mdp::DegenerateRateError);
  EXPECT_DOUBLE_EQ(mdp::rate_estimator(1), 0.5);
  EXPECT_DOUBLE_EQ(mdp::rate_estimator(2), 2);
  EXPECT_DOUBLE_EQ(mdp::rate_estimator(0.5), 0.125);
  for (double r : {0.0, -1.0}) {
    EXPECT_THROW(mdp::rate_covariance(r, 1), mdp::ConfigError);
    EXPECT_THROW(mdp::rate_estimator(r), mdp::ConfigError);
    EXPECT_THROW(mdp::rate_linear_combo(r, {1}, 1), mdp::ConfigError);
  }
}

TEST(Rates, OneHotReducesAndQuadraticScaling) {
  for (double s2 : {0.5, 1.0, 3.0})
    for (double r : {0.3, 1.0, 2.5}) {
      EXPECT_DOUBLE_EQ(mdp::rate_linear_combo(r, {0, 1, 0}, s2), mdp::rate_covariance(r, s2));
      EXPECT_DOUBLE_EQ(mdp::rate_covariance(2 * r, s2), 4 * mdp::rate_covariance(r, s2));
      EXPECT_DOUBLE_EQ(mdp::rate_linear_combo(2 * r, {0.2, 0.7}, s2), 4 * mdp::rate_linear_combo(r, {0.2, 0.7}, s2));
      EXPECT_DOUBLE_EQ(mdp::rate_estimator(2 * r), 4 * mdp::rate_estimator(r));
    }
}

TEST(Scalings, Values) {
  EXPECT_EQ(mdp::scaled_covariance_deviation(1.5, 1.5, 0.9, 1000, 1, 3), 0.0);
  EXPECT_NEAR(mdp::scaled_covariance_deviation(1.1, 1.0, 0.0, 10000, 0, 10), 1.0, 1e-12);
  EXPECT_NEAR(mdp::scaled_covariance_deviation(1.1, 1.0, 0.0, 10004, 4, 10, true), 1.0, 1e-12);
  EXPECT_EQ(mdp::scaled_estimator_deviation(0.7, 0.7, 100, 2), 0.0);
  EXPECT_NEAR(mdp::scaled_estimator_deviation(1.0, 0.99, 10000, 5), 100 / (5 * std::sqrt(0.0199)) * 0.01, 1e-12);
  EXPECT_NEAR(mdp::scaled_estimator_deviation(1.0, 0.99, 10000, 5), 1.4178, 1e-4);
}

}  // namespace
