#pragma once

// Experiment schedules (theta_n, b_n, m(n)), rate functions and MDP scalings.

#include <cstdint>
#include <string>
#include <vector>

namespace mdp {

struct SchedulePoint {
  std::int64_t n = 0;
  double theta = 0.0;
  double b = 1.0;
  int m = 3;
};

/// Monitored growth quantities at one point.
struct ConditionRow {
  double signal = 0.0;         ///< sqrt(n)(1-theta)^2/b, must diverge
  double effective_n = 0.0;    ///< n(1-theta), must diverge
  double window = 0.0;         ///< (1-theta)m, must diverge
  double window_log = 0.0;     ///< m(1-theta)/|log(1-theta)|, must diverge
  double block_growth = 0.0;   ///< b m^{1+gamma}/sqrt(n), must vanish
  double k_n = 0.0;            ///< (1-theta)^-2
  double k_m = 0.0;            ///< sum_{j=1}^{m-1} theta^j
  double residual = 0.0;       ///< K_n theta^m sqrt(1-theta^2), must vanish
};

/// Direction of each monitored quantity across consecutive points.
struct TrendFlags {
  bool signal = true;
  bool effective_n = true;
  bool window = true;
  bool window_log = true;
  bool block_growth = true;
  bool residual = true;
  /// The five growth conditions; residual is reported separately.
  bool all() const { return signal && effective_n && window && window_log && block_growth; }
};

struct Schedule {
  std::vector<SchedulePoint> points;
  double beta = 0.0;
  double gamma_b = 0.0;
  double gamma_dep = 2.0 / 3.0;
  double m_exponent = 1.2;
  bool generated = false;  ///< false for explicit point lists

  /// 1/2 - 2 beta - gamma_b; positive iff accepted.
  double exponent_margin() const { return 0.5 - 2.0 * beta - gamma_b; }
  ConditionRow conditions(std::size_t i) const;
  TrendFlags trends() const;
};

/// Throws ConfigError unless beta, gamma_b > 0, n values increasing and > 1,
/// m_exponent in (1, 5/4); ScheduleInvalidError when 1/2 - 2 beta - gamma_b <= 0.
Schedule make_schedule(double beta, double gamma_b, const std::vector<std::int64_t>& n_values,
                       double m_exponent = 1.2, double gamma_dep = 2.0 / 3.0, int m_max = 1);

/// Explicit points; each needs 0 <= theta < 1, b > 1, m > 2 m_max.
Schedule explicit_schedule(std::vector<SchedulePoint> points, double gamma_dep = 2.0 / 3.0, int m_max = 1);

ConditionRow condition_row(const SchedulePoint& p, double gamma_dep);

enum class RateKind { covariance, linear_combo, estimator };

const char* to_string(RateKind kind);

/// Positive MDP rates. All throw ConfigError for r <= 0.
double rate_covariance(double r, double second_moment);
/// Throws DegenerateRateError when the coefficients sum to zero.
double rate_linear_combo(double r, const std::vector<double>& coefficients, double second_moment);
double rate_estimator(double r);

/// (1-theta^2)^{3/2} sqrt(len)/b |empirical - theoretical| with len = n, or n - l when shifted.
double scaled_covariance_deviation(double empirical, double theoretical, double theta, std::int64_t n,
                                   std::int64_t l, double b, bool shifted = false);

/// sqrt(n)/(b sqrt(1-theta^2)) |est - theta|.
double scaled_estimator_deviation(double est, double theta, std::int64_t n, double b);

}  // namespace mdp
