#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "mdp/error.hpp"
#include "mdp/noise.hpp"

namespace {

using mdp::NoiseModel;

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double moment(const std::vector<double>& v, int p) {
  double acc = 0.0;
  for (double x : v) acc += std::pow(x, p);
  return acc / v.size();
}

TEST(NoiseModel, MomentsOfBuiltInLaws) {
  EXPECT_EQ(NoiseModel::rademacher().second_moment(), 1.0);
  EXPECT_EQ(NoiseModel::rademacher().fourth_moment(), 1.0);
  EXPECT_EQ(NoiseModel::normal(2.0).second_moment(), 4.0);
  EXPECT_EQ(NoiseModel::normal(2.0).fourth_moment(), 48.0);
  EXPECT_DOUBLE_EQ(NoiseModel::uniform(1.0).second_moment(), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(NoiseModel::uniform(1.0).fourth_moment(), 0.2);
  EXPECT_EQ(NoiseModel::three_point().second_moment(), 0.5);
  EXPECT_EQ(NoiseModel::three_point().fourth_moment(), 0.5);
  for (const auto& m : {NoiseModel::rademacher(), NoiseModel::normal(), NoiseModel::uniform(3.0),
                        NoiseModel::three_point()})
    EXPECT_GE(m.fourth_moment(), m.second_moment() * m.second_moment());
}

TEST(NoiseModel, RejectsInvalidLaws) {
  EXPECT_THROW(NoiseModel::normal(0.0), mdp::ConfigError);
  EXPECT_THROW(NoiseModel::uniform(-1.0), mdp::ConfigError);
  EXPECT_THROW(NoiseModel::discrete({-1.0, 2.0}, {{1, 2}, {1, 2}}), mdp::ConfigError);  // mean 1/2
  EXPECT_THROW(NoiseModel::discrete({-1.0, 1.0}, {{1, 3}, {1, 3}}), mdp::ConfigError);  // sums to 2/3
  EXPECT_THROW(NoiseModel::discrete({0.0}, {{1, 1}}), mdp::ConfigError);
  EXPECT_NO_THROW(NoiseModel::discrete({-2.0, 1.0}, {{1, 3}, {2, 3}}));
}

TEST(Sample, RademacherSupport) {
  for (double v : mdp::sample(NoiseModel::rademacher(), 4, {9, 1})) EXPECT_TRUE(v == 1.0 || v == -1.0);
}

TEST(Sample, RademacherMeanNearZero) {
  const auto v = mdp::sample(NoiseModel::rademacher(), 1000000, {9, 2});
  EXPECT_NEAR(mean(v), 0.0, 0.005);
}

TEST(Sample, UniformSecondMoment) {
  const auto v = mdp::sample(NoiseModel::uniform(1.0), 1000000, {9, 3});
  EXPECT_NEAR(moment(v, 2), 1.0 / 3.0, 0.01);
}

TEST(Sample, MomentsWithinFiveStandardErrors) {
  const std::size_t n = 1000000;
  for (const auto& m : {NoiseModel::normal(1.5), NoiseModel::rademacher(), NoiseModel::uniform(2.0),
                        NoiseModel::three_point(), NoiseModel::discrete({-2.0, 1.0}, {{1, 3}, {2, 3}})}) {
    const auto v = mdp::sample(m, n, {17, 5});
    double m8 = 0.0;
    for (double x : v) m8 += std::pow(x, 8);
    m8 /= n;
    const double se2 = std::sqrt((m.fourth_moment() - m.second_moment() * m.second_moment()) / n);
    const double se4 = std::sqrt((m8 - m.fourth_moment() * m.fourth_moment()) / n);
    EXPECT_NEAR(moment(v, 2), m.second_moment(), 5 * se2 + 1e-15) << m.name();
    EXPECT_NEAR(moment(v, 4), m.fourth_moment(), 5 * se4 + 1e-15) << m.name();
  }
}

TEST(Sample, ReproducibleAndStreamSeparated) {
  const auto m = NoiseModel::normal();
  EXPECT_EQ(mdp::sample(m, 1000, {5, 1}), mdp::sample(m, 1000, {5, 1}));
  const auto a = mdp::sample(m, 100000, {5, 1});
  const auto b = mdp::sample(m, 100000, {5, 2});
  double sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sab += a[i] * b[i];
  EXPECT_LT(std::fabs(sab / a.size()), 0.01);
}

TEST(Sample, PrefixStable) {
  const auto m = NoiseModel::three_point();
  const auto longer = mdp::sample(m, 101, {3, 3});
  const auto shorter = mdp::sample(m, 7, {3, 3});
  EXPECT_TRUE(std::equal(shorter.begin(), shorter.end(), longer.begin()));
}

TEST(Sample, FillLanesMatchesPerStreamSampling) {
  const std::uint64_t streams[4] = {11, 12, 13, 14};
  for (const auto& m : {NoiseModel::normal(), NoiseModel::normal(0.5), NoiseModel::rademacher(),
                        NoiseModel::uniform(1.0), NoiseModel::three_point()}) {
    const mdp::StreamId probe{77, 0};
    const std::size_t blocks = 50;
    const std::size_t per = static_cast<std::size_t>(m.draws_per_block());
    std::vector<double> out(per * blocks * 4);
    mdp::fill_lanes(m, probe.key(), streams, 10, blocks, out.data());
    for (int lane = 0; lane < 4; ++lane) {
      const auto ref = mdp::sample(m, per * (blocks + 10), {77, streams[lane]});
      for (std::size_t i = 0; i < per * blocks; ++i)
        ASSERT_EQ(out[i * 4 + lane], ref[per * 10 + i]) << m.name();
    }
  }
}

TEST(Integrability, NormalClosedForm) {
  const auto r = mdp::verify_integrability(NoiseModel::normal(), 0.25);
  EXPECT_TRUE(r.finite);
  EXPECT_DOUBLE_EQ(r.value, std::sqrt(2.0));
  EXPECT_FALSE(mdp::verify_integrability(NoiseModel::normal(), 0.5).finite);
}

TEST(Integrability, BoundedLaws) {
  const auto r = mdp::verify_integrability(NoiseModel::rademacher(), 10.0);
  EXPECT_TRUE(r.finite);
  EXPECT_NEAR(r.value, std::exp(10.0), 1e-9 * std::exp(10.0));
  // (1/a) int_0^a exp(x^2) dx at a = 1
  const auto u = mdp::verify_integrability(NoiseModel::uniform(1.0), 1.0);
  EXPECT_NEAR(u.value, 1.4626517459071816, 1e-14);
  EXPECT_NEAR(mdp::verify_integrability(NoiseModel::three_point(), 2.0).value, 0.5 + 0.5 * std::exp(2.0), 1e-12);
}

TEST(Integrability, WitnessAlphaIsValid) {
  for (const auto& m : {NoiseModel::normal(3.0), NoiseModel::rademacher(), NoiseModel::uniform(2.0)})
    EXPECT_TRUE(mdp::verify_integrability(m, m.integrability_alpha()).finite);
}

TEST(Integrability, RejectsNonPositiveAlpha) {
  EXPECT_THROW(mdp::verify_integrability(NoiseModel::normal(), 0.0), mdp::ConfigError);
  EXPECT_THROW(mdp::verify_integrability(NoiseModel::rademacher(), -1.0), mdp::ConfigError);
}

}  // namespace
