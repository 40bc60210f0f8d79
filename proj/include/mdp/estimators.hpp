#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mdp/ar1.hpp"

namespace mdp {

/// C*_l = (1/(n-l)) sum_{k=1}^{n-l} X_{k+l} X_k over states X_0..X_n.
double empirical_covariance(std::span<const double> states, std::int64_t l);
double empirical_covariance(const SamplePath& path, std::int64_t l);

/// C_l = theta^l s2 / (1 - theta^2).
double theoretical_covariance(double theta, std::int64_t l, double second_moment);

/// sum_{k=1}^n X_k X_{k-1} / sum_{k=1}^n X_{k-1}^2
double ls_estimate(std::span<const double> states);
double ls_estimate(const SamplePath& path);

/// sum_{k=1}^n X_k X_{k-1} / sum_{k=0}^n X_k^2
double yw_estimate(std::span<const double> states);
double yw_estimate(const SamplePath& path);

struct CovarianceReport {
  std::int64_t l = 0;
  double empirical = 0.0;
  double theoretical = 0.0;
  std::vector<double> z_series;  ///< Z_k = X_{k+l} X_k - C_l, k = 0..n-l
  std::vector<double> u_series;  ///< U_k, k = 1..n-l (u_series[k-1])
};

/// Needs the path's noise for indices 1..n.
CovarianceReport covariance_report(const SamplePath& path, std::int64_t l, double second_moment);

/// U_{k,l} = theta X_{k+l-1} xi_k + theta xi_{k+l} X_{k-1} + xi_{k+l} xi_k - theta^l s2.
double u_exact(const SamplePath& path, std::int64_t k, std::int64_t l, double second_moment);

struct Representation {
  double mean_u = 0.0;    ///< mean(U) / (1 - theta^2)
  double boundary = 0.0;  ///< theta^2 (Z_0 - Z_{n-l}) / ((n-l)(1 - theta^2))
};

/// C* - C split into the averaged innovation and the boundary term.
Representation representation_decompose(const CovarianceReport& report, double theta, std::int64_t n);

/// Estimator deviation written as a ratio r_n / R_n:
/// r_n = sqrt(1-theta^2)/(sqrt(n) b s2) sum_{k=1}^n xi_k X_{k-1},
/// R_n = (1-theta^2)/s2 (1/n) sum_{k=1}^n X_{k-1}^2,
/// and r_n / R_n = sqrt(n)/(b sqrt(1-theta^2)) (ls - theta).
struct EstimatorSplit {
  double r = 0.0;
  double big_r = 0.0;
  double scaled_deviation = 0.0;
};

EstimatorSplit estimator_decompose(const SamplePath& path, double second_moment, double b);

}  // namespace mdp
