#pragma once

// Big-block / small-block decomposition of an m-dependent sum, truncation,
// conditions (A)-(D) for m-dependent sums, and the maximal inequality.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdp/ar1.hpp"
#include "mdp/mdpcore.hpp"
#include "mdp/noise.hpp"
#include "mdp/stats.hpp"
#include "mdp/umoments.hpp"

namespace mdp {

/// Y_j = sum_{i=1}^m X_{(j-1)m+i}, Z_h = sum_{(h-1)p < j < hp} Y_j and
/// sum X = sum Z + skipped_tail + separators + remainder.
struct BlockDecomposition {
  int m = 1;
  int p = 2;
  std::int64_t n = 0;
  std::int64_t l_count = 0;  ///< max{j : jm <= n}
  std::int64_t t_count = 0;  ///< max{h : hp < l_count}
  std::vector<double> y_blocks;
  std::vector<double> z_blocks;
  double skipped_tail = 0.0;  ///< sum_{j=tp+1}^{l} Y_j
  double separators = 0.0;    ///< sum_{h=1}^{t} Y_{hp}
  double remainder = 0.0;     ///< sum_{i=lm+1}^{n} X_i
  double total = 0.0;         ///< sum_{i=1}^n X_i

  double reassembled() const;
};

/// seq[i-1] = X_i. Throws ConfigError for m < 1 or p < 2, TooShortError for n < mp.
BlockDecomposition decompose(std::span<const double> seq, int m, int p);

/// max(2, floor(((sqrt(n)/b)^{1/(1+gamma)}/m)^{1/2})). Throws InfeasibleError
/// when b m^{1+gamma}/sqrt(n) >= 1.
int choose_p(std::int64_t n, int m, double b, double gamma_dep);

struct TruncationSpec {
  double tau = 1.0;
  std::int64_t n = 1;
  double b = 1.0;
  double threshold() const;
};

struct Truncated {
  std::vector<double> values;
  std::int64_t zeroed = 0;
};

/// Zeroes entries with |x| > tau sqrt(n)/b.
Truncated truncate(std::span<const double> seq, const TruncationSpec& spec);

enum class CheckStatus { pass, fail, inconclusive };
const char* to_string(CheckStatus s);

struct ConditionCheck {
  std::string name;
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double target = 0.0;
  double threshold = 0.0;
  CheckStatus status = CheckStatus::pass;
  std::string note;
};

struct AbcdThresholds {
  double small = 0.05;     ///< (A), (B), (C) values must fall below this
  double d_relative = 0.1; ///< relative distance allowed in (D)
  double big_m = 1.0;      ///< free constant M of (B)
  double epsilon = 1.0;    ///< epsilon of (C)
  std::int64_t replicates = 100000;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Values of (A)-(D) at one point for X_1 = sqrt(1-theta^2) U_{1,l,m}, l = window.l.
/// (B) and (C) come from Monte Carlo with Wilson bounds, or are exactly zero
/// when a bounded noise law makes the tail event impossible.
std::vector<ConditionCheck> check_abcd(const SchedulePoint& point, double gamma_dep, const UWindow& window,
                                       const NoiseModel& model, const AbcdThresholds& thresholds);

/// 36 exp(-t^2/(alpha0 n + beta0 t)). Throws ConfigError unless alpha0, beta0 > 0 and t >= 0.
double maximal_bound(double t, std::int64_t n, double alpha0, double beta0);

struct MaximalCheck {
  double bound = 0.0;
  std::int64_t hits = 0;
  std::int64_t replicates = 0;
  double p_hat = 0.0;
  stats::Interval ci;
  bool constants_valid = true;  ///< p_hat <= bound
};

/// Frequency of max_{j<=n} |sum_{k=1}^j xi_k xi_{k-p}| >= t over independent replicates.
MaximalCheck maximal_check(const NoiseModel& model, std::int64_t n, int p, double t, double alpha0, double beta0,
                           std::int64_t replicates, std::uint64_t seed, int workers = 1);

/// sqrt(1-theta^2)/(b sqrt(n-l)) |sum_{k=1}^{n-l} (U_{k,l,m} - U_{k,l})|, l = window.l.
/// The path must retain xi from index 2-m. Throws RangeError otherwise.
double exponential_approx_gap(const SamplePath& path, const UWindow& window, double b);

}  // namespace mdp
