#include "mdp/estimators.hpp"

#include <cmath>

#include "mdp/error.hpp"

namespace mdp {

namespace {

std::int64_t length(std::span<const double> states) {
  if (states.empty()) throw RangeError("path needs at least X_0");
  return static_cast<std::int64_t>(states.size()) - 1;
}

struct Sums {
  double num = 0.0;
  double den = 0.0;  // sum_{k=1}^n X_{k-1}^2
};

Sums ratio_sums(std::span<const double> x) {
  Sums s;
  for (std::size_t k = 1; k < x.size(); ++k) {
    s.num = s.num + x[k] * x[k - 1];
    s.den = s.den + x[k - 1] * x[k - 1];
  }
  return s;
}

}  // namespace

double empirical_covariance(std::span<const double> states, std::int64_t l) {
  const std::int64_t n = length(states);
  if (l < 0 || l >= n) throw RangeError("lag must satisfy 0 <= l < n");
  double acc = 0.0;
  for (std::int64_t k = 1; k <= n - l; ++k)
    acc = acc + states[static_cast<std::size_t>(k + l)] * states[static_cast<std::size_t>(k)];
  return acc / static_cast<double>(n - l);
}

double empirical_covariance(const SamplePath& path, std::int64_t l) {
  return empirical_covariance(std::span<const double>(path.states()), l);
}

double theoretical_covariance(double theta, std::int64_t l, double second_moment) {
  if (!(theta >= 0.0 && theta < 1.0)) throw RangeError("theta must lie in [0, 1)");
  if (l < 0) throw RangeError("lag must be non-negative");
  return std::pow(theta, static_cast<double>(l)) * second_moment / (1.0 - theta * theta);
}

double ls_estimate(std::span<const double> states) {
  if (length(states) < 1) throw RangeError("estimator needs n >= 1");
  const Sums s = ratio_sums(states);
  if (s.den == 0.0) throw DegenerateSampleError("least-squares denominator is zero");
  return s.num / s.den;
}

double ls_estimate(const SamplePath& path) { return ls_estimate(std::span<const double>(path.states())); }

double yw_estimate(std::span<const double> states) {
  if (length(states) < 1) throw RangeError("estimator needs n >= 1");
  const Sums s = ratio_sums(states);
  const double den = s.den + states.back() * states.back();
  if (den == 0.0) throw DegenerateSampleError("Yule-Walker denominator is zero");
  return s.num / den;
}

double yw_estimate(const SamplePath& path) { return yw_estimate(std::span<const double>(path.states())); }

double u_exact(const SamplePath& path, std::int64_t k, std::int64_t l, double second_moment) {
  const double t = path.theta();
  return t * path.x(k + l - 1) * path.xi(k) + t * path.xi(k + l) * path.x(k - 1) +
         path.xi(k + l) * path.xi(k) - std::pow(t, static_cast<double>(l)) * second_moment;
}

CovarianceReport covariance_report(const SamplePath& path, std::int64_t l, double second_moment) {
  CovarianceReport r;
  r.l = l;
  r.empirical = empirical_covariance(path, l);
  r.theoretical = theoretical_covariance(path.theta(), l, second_moment);
  const std::int64_t n = path.n();
  r.z_series.reserve(static_cast<std::size_t>(n - l + 1));
  for (std::int64_t k = 0; k <= n - l; ++k) r.z_series.push_back(path.x(k + l) * path.x(k) - r.theoretical);
  r.u_series.reserve(static_cast<std::size_t>(n - l));
  for (std::int64_t k = 1; k <= n - l; ++k) r.u_series.push_back(u_exact(path, k, l, second_moment));
  return r;
}

Representation representation_decompose(const CovarianceReport& report, double theta, std::int64_t n) {
  const std::int64_t len = n - report.l;
  if (len < 1 || report.z_series.size() != static_cast<std::size_t>(len + 1) ||
      report.u_series.size() != static_cast<std::size_t>(len))
    throw RangeError("covariance report does not match path length");
  const double one_minus = 1.0 - theta * theta;
  double sum_u = 0.0;
  for (double u : report.u_series) sum_u += u;
  Representation rep;
  rep.mean_u = sum_u / static_cast<double>(len) / one_minus;
  rep.boundary = theta * theta * (report.z_series.front() - report.z_series.back()) /
                 (static_cast<double>(len) * one_minus);
  return rep;
}

EstimatorSplit estimator_decompose(const SamplePath& path, double second_moment, double b) {
  const std::int64_t n = path.n();
  const double t = path.theta();
  const double one_minus = 1.0 - t * t;
  double cross = 0.0, sq = 0.0;
  for (std::int64_t k = 1; k <= n; ++k) {
    cross += path.xi(k) * path.x(k - 1);
    sq += path.x(k - 1) * path.x(k - 1);
  }
  const double nd = static_cast<double>(n);
  EstimatorSplit s;
  s.r = std::sqrt(one_minus) / (std::sqrt(nd) * b * second_moment) * cross;
  s.big_r = one_minus / second_moment * sq / nd;
  s.scaled_deviation = s.r / s.big_r;
  return s;
}

}  // namespace mdp
