#include <cmath>

#include <gtest/gtest.h>

#include "mdp/error.hpp"
#include "mdp/umoments.hpp"

namespace {

using mdp::MomentKind;
using mdp::MomentQuery;
using mdp::NoiseModel;
using mdp::UWindow;

UWindow rad(int m_max, int m, double theta, int l = 0, int q = 0, std::vector<double> a = {}) {
  return UWindow::make(m_max, m, theta, NoiseModel::rademacher(), l, q, std::move(a));
}

TEST(UWindow, EnforcesStandingAssumptions) {
  EXPECT_THROW(rad(2, 4, 0.5), mdp::ConfigError);
  EXPECT_NO_THROW(rad(2, 5, 0.5));
  EXPECT_THROW(rad(1, 5, 0.5, 2), mdp::ConfigError);
  EXPECT_THROW(rad(1, 5, 0.5, 0, 0, {1.0}), mdp::ConfigError);
  EXPECT_THROW(rad(1, 5, 1.0), mdp::ConfigError);
}

TEST(EvenPowerSum, LoopAndClosedFormAgree) {
  EXPECT_EQ(mdp::even_power_sum(0.5, 3, 2), 0.0);
  EXPECT_EQ(mdp::even_power_sum(0.0, 0, 10), 1.0);
  EXPECT_EQ(mdp::even_power_sum(0.0, 1, 10), 0.0);
  for (double t : {0.3, 0.9, 0.999}) {
    double loop = 0.0;
    for (int j = 2; j <= 500; ++j) loop += std::pow(t, 2 * j);
    EXPECT_NEAR(mdp::even_power_sum(t, 2, 500), loop, 1e-12 * loop);
  }
}

// Values frozen from an exact rational expansion of E(U U) over fourth-order
// noise moments, computed independently of the closed forms.
TEST(ClosedForms, FrozenReferenceValues) {
  EXPECT_NEAR(mdp::u_second_moment(rad(1, 12, 0.5, 1)), 1.4166665077209473, 1e-13);
  EXPECT_NEAR(mdp::u_cross_same_lag(1, rad(2, 12, 0.5, 2)), 0.0625, 1e-15);
  const UWindow normal = UWindow::make(1, 12, 0.5, NoiseModel::normal(), 0);
  EXPECT_NEAR(mdp::u_second_moment(normal), 3.3333330154418945, 1e-13);

  const NoiseModel tp = NoiseModel::three_point();
  EXPECT_NEAR(mdp::block_variance_exact(2, UWindow::make(2, 8, 0.7, tp)), 7.98835581601796, 1e-12);
  EXPECT_NEAR(mdp::block_variance_exact(1, UWindow::make(2, 8, 0.7, tp)), 9.13327258867146, 1e-12);
  EXPECT_NEAR(mdp::u_cross_mixed(1, 2, 1, UWindow::make(2, 7, 0.7, tp)), 0.4241377936075, 1e-13);
  EXPECT_NEAR(mdp::u_cross_mixed(0, 2, 1, UWindow::make(2, 7, 0.7, tp)), 0.3383877936075, 1e-13);
  EXPECT_NEAR(mdp::u_cross_mixed(1, 1, 0, rad(2, 5, 0.3)), 0.6592974, 1e-13);

  const UWindow hat = UWindow::make(2, 6, 0.3, tp, 0, 0, {0.5, -1.0, 2.0});
  const auto h = mdp::hat_y_moments(hat);
  EXPECT_NEAR(h.second_moment, 1.218868451475, 1e-13);
  EXPECT_NEAR(h.at(1), -0.19775198475, 1e-13);
  EXPECT_NEAR(h.at(2), 0.043451955, 1e-13);
}

TEST(ClosedForms, TrivialCases) {
  const NoiseModel n = NoiseModel::normal();
  EXPECT_DOUBLE_EQ(mdp::u_second_moment(UWindow::make(1, 5, 0.0, n)), 3.0 - 1.0);
  EXPECT_EQ(mdp::u_cross_same_lag(3, rad(2, 7, 0.6, 0)), 0.0);
  EXPECT_EQ(mdp::u_cross_same_lag(2, rad(2, 7, 0.6, 1)), 0.0);
  EXPECT_EQ(mdp::u_cross_mixed(2, 0, 1, rad(2, 7, 0.6)), 0.0);
  EXPECT_EQ(mdp::u_cross_mixed(0, 0, 2, rad(2, 7, 0.0)), 0.0);
  EXPECT_EQ(mdp::weighted_time_sum(0, rad(2, 7, 0.6)), 0.0);
  const UWindow w = rad(2, 9, 0.6, 1);
  EXPECT_NEAR(mdp::weighted_time_sum(1, w), 0.36 * mdp::even_power_sum(0.6, 0, 9 - 3), 1e-15);
  EXPECT_DOUBLE_EQ(mdp::block_variance_exact(0, w), 9 * mdp::u_second_moment(0, w));
}

TEST(ClosedForms, DisplayedAggregateDiffersForLagsAboveOne) {
  for (double t : {0.3, 0.7}) {
    const UWindow w = UWindow::make(2, 7, t, NoiseModel::three_point());
    EXPECT_NEAR(mdp::block_variance_displayed(1, w), mdp::block_variance_exact(1, w), 1e-12);
    EXPECT_NEAR(mdp::block_variance_exact(2, w) - mdp::block_variance_displayed(2, w), 2.0 * std::pow(t, 4) * 0.25,
                1e-12);
  }
}

TEST(UValue, RademacherLagZero) {
  const auto p = mdp::simulate(0.6, 200, NoiseModel::rademacher(), {1, 1});
  const UWindow w = rad(1, 7, 0.6, 0);
  for (std::int64_t k = 10; k < 200; k += 13) {
    double expect = 0.0;
    for (int j = 1; j <= 6; ++j) expect += 2.0 * std::pow(0.6, j) * p.xi(k - j) * p.xi(k);
    EXPECT_NEAR(mdp::u_value(p, k, w), expect, 1e-14);
  }
  const auto z = mdp::simulate(0.0, 50, NoiseModel::normal(), {1, 2});
  const UWindow w0 = UWindow::make(1, 4, 0.0, NoiseModel::normal());
  EXPECT_DOUBLE_EQ(mdp::u_value(z, 20, w0), z.xi(20) * z.xi(20) - 1.0);
}

TEST(UValue, MeanAndSecondMomentByMonteCarlo) {
  const double theta = 0.5;
  const auto p = mdp::simulate(theta, 1000000, NoiseModel::normal(), {2, 1}, {mdp::InitPolicy::truncated_series, 1e-12, 20});
  const UWindow w = UWindow::make(1, 12, theta, NoiseModel::normal(), 0);
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  std::int64_t count = 0;
  for (std::int64_t k = 1; k <= p.n(); ++k) {
    const double u = mdp::u_value(p, k, w);
    s1 += u;
    s2 += u * u;
    s4 += u * u * u * u;
    ++count;
  }
  const double mean = s1 / count, second = s2 / count;
  // the sequence is (m+l)-dependent; inflate the i.i.d. error by the window length
  const double dep = std::sqrt(2.0 * 12.0);
  EXPECT_NEAR(mean, 0.0, 5.0 * dep * std::sqrt(second / count));
  EXPECT_NEAR(second, mdp::u_second_moment(w), 5.0 * dep * std::sqrt((s4 / count - second * second) / count));
}

TEST(HatMoments, OneHotReducesToSingleLag) {
  for (int l = 0; l <= 2; ++l) {
    std::vector<double> a(3, 0.0);
    a[l] = 1.0;
    const UWindow w = UWindow::make(2, 8, 0.7, NoiseModel::three_point(), l, 0, a);
    const auto h = mdp::hat_y_moments(w);
    EXPECT_NEAR(h.second_moment, mdp::u_second_moment(l, w), 1e-13);
    for (int g = 1; g <= 10; ++g) EXPECT_NEAR(h.at(g), g <= 10 ? (l == 0 ? 0.0 : mdp::u_cross_same_lag(g, w)) : 0.0, 1e-13);
  }
}

TEST(HatMoments, ExpansionMatchesBilinearForm) {
  for (double t : {0.0, 0.3, 0.7, 0.9})
    for (int m_max : {1, 2, 3}) {
      std::vector<double> a;
      for (int l = 0; l <= m_max; ++l) a.push_back(0.7 * l - 0.4 + 0.1 * l * l);
      const UWindow w = UWindow::make(m_max, 2 * m_max + 3, t, 1.3, 2.9, 0, 0, a);
      const auto h = mdp::hat_y_moments(w);
      for (int g = 0; g <= w.m + m_max + 2; ++g) EXPECT_NEAR(h.at(g), mdp::hat_y_bilinear(g, w), 1e-10);
    }
}

TEST(HatMoments, ScaledBlockVarianceLimit) {
  const double t = 0.9999;
  const int m = static_cast<int>(std::ceil(std::pow(1 - t, -1.2)));
  const std::vector<double> a{0.5, 0.25, 0.75};
  const UWindow w = UWindow::make(2, m, t, NoiseModel::normal(), 0, 0, a);
  const double scaled = (1 - t * t) / m * mdp::hat_block_variance(w);
  EXPECT_NEAR(scaled, 4.0 * 1.5 * 1.5, 0.01 * 9.0);
}

TEST(HatMoments, EstimatorWeights) {
  const auto a = mdp::estimator_weights(0.9, 2.0);
  EXPECT_DOUBLE_EQ(a[0], -0.9 / (0.19 * 2.0));
  EXPECT_DOUBLE_EQ(a[1], 1.0 / (0.19 * 2.0));
  EXPECT_DOUBLE_EQ(mdp::hat_x_second_moment(0.5, 3), 1.0 - std::pow(0.25, 3));
}

TEST(Oracle, MeanIsZero) {
  for (double t : {0.0, 0.4, 0.9})
    for (int l = 0; l <= 2; ++l)
      for (const auto& model : {NoiseModel::rademacher(), NoiseModel::three_point()}) {
        const MomentQuery q{MomentKind::mean, 0, UWindow::make(2, 6, t, model, l)};
        EXPECT_NEAR(mdp::brute_force_moment(q, model), 0.0, 1e-12);
      }
}

TEST(Oracle, SameLagCrossAtTwelve) {
  const UWindow w = rad(1, 12, 0.5, 1, 1);
  const double oracle = mdp::brute_force_moment({MomentKind::same_lag_cross, 1, w}, NoiseModel::rademacher());
  EXPECT_NEAR(oracle, mdp::u_cross_same_lag(1, w), 1e-10);
}

TEST(Oracle, ThreePointLawMoments) {
  const NoiseModel tp = NoiseModel::three_point();
  EXPECT_EQ(tp.second_moment(), 0.5);
  EXPECT_EQ(tp.fourth_moment(), 0.5);
  for (int l = 0; l <= 2; ++l)
    for (int q = 0; q <= 2; ++q)
      for (int gap = 0; gap <= 9; ++gap) {
        const UWindow w = UWindow::make(2, 6, 0.7, tp, l, q);
        const MomentQuery qy{MomentKind::mixed_cross, gap, w};
        ASSERT_NEAR(mdp::brute_force_moment(qy, tp), mdp::closed_form(qy), 1e-10)
            << "l=" << l << " q=" << q << " gap=" << gap;
      }
}

TEST(Oracle, MDependence) {
  const NoiseModel r = NoiseModel::rademacher();
  for (int gap = 7; gap <= 10; ++gap) {
    const UWindow w = UWindow::make(2, 5, 0.8, r, 2, 1);
    EXPECT_NEAR(mdp::brute_force_moment({MomentKind::mixed_cross, gap, w}, r), 0.0, 1e-12);
    EXPECT_EQ(mdp::u_cross_mixed(gap, 2, 1, w), 0.0);
  }
}

TEST(Oracle, BlockAndHatAggregates) {
  const NoiseModel tp = NoiseModel::three_point();
  const UWindow w = UWindow::make(2, 6, 0.9, tp, 2, 0, {1.0, -0.5, 0.25});
  for (auto kind : {MomentKind::block_variance, MomentKind::hat_variance, MomentKind::hat_block_variance}) {
    const MomentQuery q{kind, 0, w};
    EXPECT_NEAR(mdp::brute_force_moment(q, tp), mdp::closed_form(q), 1e-10) << mdp::to_string(kind);
  }
  const MomentQuery cross{MomentKind::hat_cross, 2, w};
  EXPECT_NEAR(mdp::brute_force_moment(cross, tp, 3), mdp::closed_form(cross), 1e-10);
}

TEST(Oracle, WorkersDoNotChangeResult) {
  const NoiseModel tp = NoiseModel::three_point();
  const MomentQuery q{MomentKind::mixed_cross, 1, UWindow::make(2, 7, 0.3, tp, 2, 1)};
  EXPECT_EQ(mdp::brute_force_moment(q, tp, 1), mdp::brute_force_moment(q, tp, 1));
  EXPECT_NEAR(mdp::brute_force_moment(q, tp, 4), mdp::brute_force_moment(q, tp, 1), 1e-15);
}

TEST(Oracle, GuardAndSupportChecks) {
  const NoiseModel five = NoiseModel::discrete({-2, -1, 0, 1, 2}, {{1, 5}, {1, 5}, {1, 5}, {1, 5}, {1, 5}});
  EXPECT_THROW(mdp::brute_force_moment({MomentKind::variance, 0, UWindow::make(1, 14, 0.5, five)}, five),
               mdp::EnumerationGuardError);
  EXPECT_THROW(mdp::brute_force_moment({MomentKind::variance, 0, UWindow::make(1, 4, 0.5, NoiseModel::normal())},
                                       NoiseModel::normal()),
               mdp::ConfigError);
}

TEST(Limits, ScaledVarianceNearUnitRoot) {
  for (double t : {0.999, 0.9999}) {
    const int m = static_cast<int>(std::ceil(std::pow(1 - t, -1.2)));
    for (int l = 0; l <= 2; ++l) {
      const UWindow w = UWindow::make(2, m, t, NoiseModel::rademacher());
      const double scaled = (1 - t * t) / m * mdp::block_variance_exact(l, w);
      EXPECT_NEAR(scaled, 4.0, (t == 0.999 ? 0.05 : 0.01) * 4.0);
      EXPECT_NEAR((1 - t * t) / m * mdp::weighted_time_sum(l, w), 0.0, 0.01);
    }
  }
}

}  // namespace

TEST(Oracle, ResultDoesNotDependOnWorkers) {
  const auto model = NoiseModel::three_point();
  for (int gap = 0; gap <= 4; ++gap) {
    MomentQuery q;
    q.kind = MomentKind::mixed_cross;
    q.window = UWindow::make(1, 6, 0.3, model, 1, 0);
    q.gap = gap;
    const double one = mdp::brute_force_moment(q, model, 1);
    for (int w : {2, 3, 7}) EXPECT_EQ(mdp::brute_force_moment(q, model, w), one);
  }
}
