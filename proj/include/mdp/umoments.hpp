#pragma once

// Moments of the m-dependent approximants
//   U_{k,l,m} = sum_{j=1}^{m-1} th^j xi_{k+l-j} xi_k + sum_{j=1}^{m-1} th^j xi_{k+l} xi_{k-j}
//               + xi_{k+l} xi_k - th^l E xi^2
// and of Yhat_k = sum_l a_l U_{k,l,m}, in closed form and by exhaustive
// enumeration over a finite-support noise law.

#include <cstdint>
#include <vector>

#include "mdp/ar1.hpp"
#include "mdp/noise.hpp"

namespace mdp {

struct UWindow {
  int l = 0;
  int q = 0;
  int m = 3;
  int m_max = 1;
  double theta = 0.0;
  double s2 = 1.0;  ///< E xi^2
  double s4 = 1.0;  ///< E xi^4
  std::vector<double> coefficients;  ///< a_0..a_{m_max}, or empty

  /// Throws ConfigError unless m > 2 m_max, 0 <= l, q <= m_max, theta in
  /// [0, 1) and coefficients (if any) have m_max + 1 entries.
  static UWindow make(int m_max, int m, double theta, double s2, double s4, int l = 0, int q = 0,
                      std::vector<double> coefficients = {});
  static UWindow make(int m_max, int m, double theta, const NoiseModel& model, int l = 0, int q = 0,
                      std::vector<double> coefficients = {});
};

/// sum_{j=lo}^{hi} theta^{2j}; zero when hi < lo.
double even_power_sum(double theta, std::int64_t lo, std::int64_t hi);

/// U_{k,l,m} on a path, l = window.l. Needs xi_{k-m+1} .. xi_{k+l}.
double u_value(const SamplePath& path, std::int64_t k, const UWindow& window);

/// E U_{k,l,m}^2 with l = window.l.
double u_second_moment(const UWindow& window);
/// E U_{k,l,m}^2 for an explicit lag.
double u_second_moment(int l, const UWindow& window);

/// E(U_{i,l} U_{k,l}), gap = k - i >= 1, l = window.l.
double u_cross_same_lag(int gap, const UWindow& window);

/// E(U_{i,l} U_{k,q}), gap = k - i >= 0.
double u_cross_mixed(int gap, int l, int q, const UWindow& window);

/// Var(U_{1,l} + ... + U_{m,l}) summed exactly over all index pairs.
double block_variance_exact(int l, const UWindow& window);

/// The aggregate as printed in the source derivation:
/// m th^{2l} s4 + (m + [2(m-l)l - 2m] th^{2l}) s2^2
///   + (2m sum_{j=1}^{m-1} th^{2j} + 2(m-l) th^{2l} sum_{j=1}^{m-1-2l} th^{2j}) s2^2.
/// It falls short of block_variance_exact by l(l-1) th^{2l} s2^2; kept so the
/// discrepancy can be reported.
double block_variance_displayed(int l, const UWindow& window);

/// sum_{k=1}^{m} k E(U_{1,l} U_{k+1,l}).
double weighted_time_sum(int l, const UWindow& window);

struct HatMoments {
  double second_moment = 0.0;  ///< E Yhat^2
  std::vector<double> cross;   ///< cross[g-1] = E(Yhat_i Yhat_{i+g}), g = 1..m+m_max
  double at(int gap) const;    ///< gap 0 gives the second moment; zero past the table
};

/// Assembled from the five cross terms I_1..I_5 and the five-term
/// expansion of E Yhat^2. Requires coefficients.
HatMoments hat_y_moments(const UWindow& window);

/// E(Yhat_i Yhat_{i+gap}) as sum_l sum_q a_l a_q E(U_{i,l} U_{i+gap,q}).
double hat_y_bilinear(int gap, const UWindow& window);

/// Var(Yhat_1 + ... + Yhat_m).
double hat_block_variance(const UWindow& window);

/// Weights a_0 = -th/((1-th^2) s2), a_1 = 1/((1-th^2) s2) turning the
/// least-squares error into a linear combination of lag-0 and lag-1 covariances.
std::vector<double> estimator_weights(double theta, double s2);

/// E Xhat_{k,m}^2 = 1 - theta^{2m} for
/// Xhat_{k,m} = sqrt(1-th^2)/s2 sum_{p=0}^{m-1} th^p xi_{k-1-p} xi_k.
double hat_x_second_moment(double theta, int m);

enum class MomentKind {
  mean,
  variance,
  same_lag_cross,
  mixed_cross,
  hat_variance,
  hat_cross,
  block_variance,
  hat_block_variance
};

const char* to_string(MomentKind kind);

struct MomentQuery {
  MomentKind kind = MomentKind::variance;
  int gap = 0;
  UWindow window;
};

/// The closed form matching a query.
double closed_form(const MomentQuery& query);

/// Upper bound on assignments the oracle may visit.
inline constexpr std::uint64_t kEnumerationGuard = std::uint64_t{1} << 26;

/// Exact expectation by enumerating every joint noise assignment. The two
/// factors of a product are conditionally independent given their shared
/// indices, so the enumeration runs over shared assignments and, inside,
/// over each factor's private indices. Block variances are summed from
/// enumerated pair moments. Throws EnumerationGuardError past the guard.
double brute_force_moment(const MomentQuery& query, const NoiseModel& model, int workers = 1);

}  // namespace mdp
