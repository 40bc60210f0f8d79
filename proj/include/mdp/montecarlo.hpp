#pragma once

// Replicated simulation of schedule points and the tail statistics built on it.
// Replicates run four at a time through the lane kernels; replicate r of point
// p always draws from stream derive_stream(kSimulationDomain, p, r), so results
// do not depend on the worker count.

#include <cstdint>
#include <string>
#include <vector>

#include "mdp/mdpcore.hpp"
#include "mdp/noise.hpp"
#include "mdp/stats.hpp"

namespace mdp {

inline constexpr std::uint64_t kSimulationDomain = 0x51A1;

/// What one simulated path leaves behind; index i of each array is lag i.
struct PathSummary {
  std::vector<double> cov;   ///< sum_{k=1}^{n-l} X_{k+l} X_k
  std::vector<double> gap;   ///< sum_{k=1}^{n-l} (U_{k,l,m} - U_{k,l})
  std::vector<double> head;  ///< X_0 .. X_L
  std::vector<double> tail;  ///< X_n, X_{n-1}, .., X_{n-L}
  double ls_num = 0.0;       ///< sum_{k=1}^n X_k X_{k-1}
  double ls_den = 0.0;       ///< sum_{k=1}^n X_{k-1}^2

  double ls() const;
  double yw() const;
};

struct EngineOptions {
  std::uint64_t seed = 0;
  int workers = 1;
  double eps = 1e-12;  ///< burn-in tolerance theta^H <= eps
};

/// Simulates `replicates` paths X_0..X_n started at -H from zero with H the
/// truncation horizon; lags 0..max_lag are accumulated and the gap uses width point.m.
std::vector<PathSummary> simulate_point(const SchedulePoint& point, std::uint64_t point_id, const NoiseModel& model,
                                        int max_lag, std::int64_t replicates, const EngineOptions& options);

enum class StatKind { covariance, linear, estimator_ls, estimator_yw, boundary, gap };

const char* to_string(StatKind kind);
/// Parses covariance | linear | estimator-ls | estimator-yw | boundary | gap.
StatKind parse_stat_kind(const std::string& text);

struct StatSpec {
  StatKind kind = StatKind::covariance;
  int lag = 0;                        ///< covariance, boundary, gap
  std::vector<double> coefficients;   ///< linear

  /// Largest lag the statistic reads.
  int max_lag() const;
  /// File-name label, e.g. covariance_l1.
  std::string label() const;
};

/// MDP-scaled absolute statistic of one path.
double statistic(const StatSpec& spec, const PathSummary& path, const SchedulePoint& point, double second_moment);

/// Rate the tail of `spec` should decay at; +inf for boundary and gap.
double theoretical_rate(const StatSpec& spec, double r, double second_moment);

struct TailEstimate {
  double r = 0.0;
  std::int64_t hits = 0;
  std::int64_t replicates = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double empirical_rate = 0.0;  ///< -log(p_hat)/b^2, or the (hits+1) bound when hits = 0
  double theoretical_rate = 0.0;
  bool lower_bound = false;     ///< hits = 0, empirical_rate is a lower bound

  double ratio() const { return empirical_rate / theoretical_rate; }
};

/// Thresholds one set of statistic values at r.
TailEstimate tail_estimate(const std::vector<double>& values, double r, double b, double theoretical);

struct RateCurve {
  std::size_t point_index = 0;
  SchedulePoint point;
  StatSpec spec;
  std::vector<TailEstimate> cells;

  /// max |ratio - 1| over cells with CI width below p_hat; 0 when none qualify.
  double diagnostic() const;
};

struct CurveRequest {
  std::vector<StatSpec> specs;
  std::vector<double> r_grid;
  std::int64_t replicates = 1000;
};

/// One curve per (point, spec), points outermost. All specs at a point share
/// one replicate set. Throws ConfigError for an empty or non-increasing grid,
/// DegenerateRateError for linear coefficients summing to zero.
std::vector<RateCurve> rate_curves(const Schedule& schedule, const NoiseModel& model, const CurveRequest& request,
                                   const EngineOptions& options);

/// statistic() over every path.
std::vector<double> statistic_values(const StatSpec& spec, const std::vector<PathSummary>& paths,
                                     const SchedulePoint& point, double second_moment);

/// Curve of one spec at one point from its statistic values.
RateCurve curve_from_values(std::size_t point_index, const SchedulePoint& point, const StatSpec& spec,
                            const std::vector<double>& values, const std::vector<double>& r_grid, double second_moment);

/// Single-cell convenience over rate_curves.
TailEstimate tail_probability(const StatSpec& spec, const SchedulePoint& point, double r, const NoiseModel& model,
                              std::int64_t replicates, const EngineOptions& options, std::uint64_t point_id = 0);

/// Band verdict for one spec along a schedule.
struct BandCheck {
  int cells_in_band = 0;       ///< cells with p_hat in [p_low, p_high]
  int cells_outside_ratio = 0; ///< of those, ratio outside [ratio_low, ratio_high]
  std::vector<double> worst;   ///< per point: worst |ratio - 1| among band cells (NaN if none)
  std::vector<double> worst_low;   ///< per point: CI lower end of that distance
  std::vector<double> worst_high;  ///< per point: CI upper end of that distance
  bool ratios_ok = false;
  bool trend_ok = false;       ///< worst distance non-increasing in n up to CI overlap
};

struct BandRule {
  double p_low = 1e-3;
  double p_high = 1e-1;
  double ratio_low = 0.5;
  double ratio_high = 2.0;
};

/// `curves` are the curves of one spec, ordered by n.
BandCheck band_check(const std::vector<RateCurve>& curves, const BandRule& rule = {});

struct CltResult {
  double ks = 0.0;
  double critical_5 = 0.0;
  double n_one_minus_theta = 0.0;
  std::int64_t replicates = 0;
  bool low_power = false;  ///< fewer than 1000 replicates
};

/// KS distance of sqrt(n)(ls - theta)/sqrt(1-theta^2) from N(0,1).
CltResult clt_check(double theta, std::int64_t n, std::int64_t replicates, const NoiseModel& model,
                    const EngineOptions& options);

struct VarianceRow {
  SchedulePoint point;
  int l = 0;
  double exact = 0.0;     ///< (1-theta^2)/m Var(U_1+...+U_m)
  double mc = 0.0;        ///< same from simulated block sums
  double mc_se = 0.0;
  double target = 0.0;    ///< 4 (E xi^2)^2
  double relative = 0.0;  ///< |exact/target - 1|
};

/// mc_replicates = 0 skips the Monte Carlo cross-check.
std::vector<VarianceRow> variance_convergence(const Schedule& schedule, int l, const NoiseModel& model,
                                              std::int64_t mc_replicates, const EngineOptions& options);

struct NegligibilityRow {
  SchedulePoint point;
  StatKind kind = StatKind::boundary;
  TailEstimate tail;
  double p999 = 0.0;  ///< 99.9th percentile of the scaled term
};

struct NegligibilityTable {
  std::vector<NegligibilityRow> rows;  ///< by point, boundary then gap
  bool boundary_increasing = false;    ///< -log P/b^2 strictly increasing (zero-hit points by their bound), or all zero-hit
  bool gap_increasing = false;
};

NegligibilityTable boundary_negligibility(const Schedule& schedule, int l, double r, const NoiseModel& model,
                                          std::int64_t replicates, const EngineOptions& options);

/// Builds the table from statistics already simulated: boundary[i], gap[i] hold point i's values.
NegligibilityTable negligibility_from_values(const Schedule& schedule, double r,
                                             const std::vector<std::vector<double>>& boundary,
                                             const std::vector<std::vector<double>>& gap);

/// Value at quantile q in (0,1] by the nearest-rank rule.
double quantile(std::vector<double> values, double q);

}  // namespace mdp
