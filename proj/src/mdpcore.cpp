#include "mdp/mdpcore.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "mdp/error.hpp"

namespace mdp {

namespace {

void check_r(double r) {
  if (!(r > 0.0)) throw ConfigError("rate argument r must be positive");
}

void check_point(const SchedulePoint& p, int m_max) {
  if (p.n < 2) throw ConfigError("schedule point needs n >= 2");
  if (!(p.theta >= 0.0 && p.theta < 1.0)) throw ConfigError("schedule point needs 0 <= theta < 1");
  if (!(p.b > 1.0)) throw ConfigError("schedule point needs b > 1");
  if (p.m <= 2 * m_max) throw ConfigError("schedule point needs m > 2*M_max");
}

}  // namespace

ConditionRow condition_row(const SchedulePoint& p, double gamma_dep) {
  const double gap = 1.0 - p.theta;
  const double sqrt_n = std::sqrt(static_cast<double>(p.n));
  ConditionRow row;
  row.signal = sqrt_n * gap * gap / p.b;
  row.effective_n = static_cast<double>(p.n) * gap;
  row.window = gap * p.m;
  row.window_log = p.m * gap / std::abs(std::log(gap));
  row.block_growth = p.b * std::pow(static_cast<double>(p.m), 1.0 + gamma_dep) / sqrt_n;
  row.k_n = 1.0 / (gap * gap);
  const double k_m = p.theta == 0.0 ? 0.0
                     : p.theta * -std::expm1((p.m - 1) * std::log1p(-gap)) / gap;
  row.k_m = k_m;
  row.residual = row.k_n * std::exp(p.m * std::log1p(-gap)) * std::sqrt(1.0 - p.theta * p.theta);
  return row;
}

ConditionRow Schedule::conditions(std::size_t i) const { return condition_row(points.at(i), gamma_dep); }

TrendFlags Schedule::trends() const {
  TrendFlags f;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const ConditionRow a = conditions(i - 1), b = conditions(i);
    f.signal = f.signal && b.signal > a.signal;
    f.effective_n = f.effective_n && b.effective_n > a.effective_n;
    f.window = f.window && b.window > a.window;
    f.window_log = f.window_log && b.window_log > a.window_log;
    f.block_growth = f.block_growth && b.block_growth < a.block_growth;
    f.residual = f.residual && b.residual < a.residual;
  }
  return f;
}

Schedule make_schedule(double beta, double gamma_b, const std::vector<std::int64_t>& n_values, double m_exponent,
                       double gamma_dep, int m_max) {
  if (!(beta > 0.0)) throw ConfigError("schedule beta must be positive");
  if (!(gamma_b > 0.0)) throw ConfigError("schedule gamma_b must be positive");
  if (!(m_exponent > 1.0 && m_exponent < 1.25)) throw ConfigError("m_exponent must lie in (1, 5/4)");
  if (!(gamma_dep > 0.0 && gamma_dep < 1.0)) throw ConfigError("gamma_dep must lie in (0, 1)");
  if (n_values.empty()) throw ConfigError("schedule needs at least one n");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 2) throw ConfigError("schedule n values must be >= 2");
    if (i > 0 && n_values[i] <= n_values[i - 1]) throw ConfigError("schedule n values must increase");
  }
  Schedule s;
  s.beta = beta;
  s.gamma_b = gamma_b;
  s.gamma_dep = gamma_dep;
  s.m_exponent = m_exponent;
  s.generated = true;
  const double margin = s.exponent_margin();
  if (!(margin > 0.0)) {
    std::ostringstream msg;
    msg << "schedule rejected: sqrt(n)(1-theta)^2/b -> inf requires 1/2 - 2*beta - gamma_b > 0, got 1/2 - 2*"
        << beta << " - " << gamma_b << " = " << margin;
    throw ScheduleInvalidError(msg.str());
  }
  for (std::int64_t n : n_values) {
    const double nd = static_cast<double>(n);
    const double gap = std::pow(nd, -beta);
    SchedulePoint p;
    p.n = n;
    p.theta = 1.0 - gap;
    p.b = std::pow(nd, gamma_b);
    p.m = static_cast<int>(std::ceil(std::pow(gap, -m_exponent)));
    check_point(p, m_max);
    s.points.push_back(p);
  }
  return s;
}

Schedule explicit_schedule(std::vector<SchedulePoint> points, double gamma_dep, int m_max) {
  if (points.empty()) throw ConfigError("schedule needs at least one point");
  if (!(gamma_dep > 0.0 && gamma_dep < 1.0)) throw ConfigError("gamma_dep must lie in (0, 1)");
  for (const auto& p : points) check_point(p, m_max);
  Schedule s;
  s.points = std::move(points);
  s.gamma_dep = gamma_dep;
  return s;
}

const char* to_string(RateKind kind) {
  switch (kind) {
    case RateKind::covariance: return "covariance";
    case RateKind::linear_combo: return "linear";
    case RateKind::estimator: return "estimator";
  }
  return "?";
}

double rate_covariance(double r, double second_moment) {
  check_r(r);
  return r * r / (8.0 * second_moment * second_moment);
}

double rate_linear_combo(double r, const std::vector<double>& coefficients, double second_moment) {
  check_r(r);
  const double sum = std::accumulate(coefficients.begin(), coefficients.end(), 0.0);
  if (sum == 0.0) throw DegenerateRateError("linear-combination coefficients sum to zero");
  const double sigma2 = 4.0 * sum * sum * second_moment * second_moment;
  return r * r / (2.0 * sigma2);
}

double rate_estimator(double r) {
  check_r(r);
  return r * r / 2.0;
}

double scaled_covariance_deviation(double empirical, double theoretical, double theta, std::int64_t n,
                                   std::int64_t l, double b, bool shifted) {
  const double one_minus = 1.0 - theta * theta;
  const double len = static_cast<double>(shifted ? n - l : n);
  return one_minus * std::sqrt(one_minus) * std::sqrt(len) / b * std::abs(empirical - theoretical);
}

double scaled_estimator_deviation(double est, double theta, std::int64_t n, double b) {
  return std::sqrt(static_cast<double>(n)) / (b * std::sqrt(1.0 - theta * theta)) * std::abs(est - theta);
}

}  // namespace mdp
