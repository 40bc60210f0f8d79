#include "mdp/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "mdp/ar1.hpp"
#include "mdp/error.hpp"
#include "mdp/estimators.hpp"
#include "mdp/kernels.hpp"
#include "mdp/umoments.hpp"

namespace mdp {

namespace {

using kernels::kLanes;

constexpr std::size_t kChunkDraws = 1024;
constexpr std::uint64_t kCltPoint = 0xC17;
constexpr std::uint64_t kBlockDomain = 0xB5A7;

}  // namespace

double PathSummary::ls() const { return ls_num / ls_den; }

double PathSummary::yw() const { return ls_num / (ls_den + tail[0] * tail[0]); }

std::vector<PathSummary> simulate_point(const SchedulePoint& point, std::uint64_t point_id, const NoiseModel& model,
                                        int max_lag, std::int64_t replicates, const EngineOptions& options) {
  if (max_lag < 0 || max_lag > kernels::kMaxLag) throw ConfigError("lag out of range for the simulation engine");
  if (point.m < 2) throw ConfigError("simulation needs m >= 2");
  if (point.n <= max_lag) throw ConfigError("simulation needs n > max lag");
  if (replicates < 1) throw ConfigError("simulation needs replicates >= 1");
  if (!(point.theta >= 0.0 && point.theta < 1.0)) throw ConfigError("simulation needs 0 <= theta < 1");

  const std::int64_t horizon = truncation_horizon(point.theta, options.eps);
  const kernels::ArParams params{point.theta, std::pow(point.theta, point.m - 1), max_lag, point.m};
  const auto& table = kernels::active_table();
  const auto key = StreamId{options.seed, 0}.key();
  const auto per_block = static_cast<std::size_t>(model.draws_per_block());
  const std::size_t chunk_blocks = kChunkDraws / per_block;
  const std::int64_t total = horizon + point.n + 1;
  const std::int64_t groups = (replicates + kLanes - 1) / kLanes;
  const auto lags = static_cast<std::size_t>(max_lag) + 1;

  std::vector<PathSummary> out(static_cast<std::size_t>(replicates));
  stats::parallel_for(groups, options.workers, [&](std::int64_t g) {
    std::array<std::uint64_t, kLanes> streams{};
    for (int lane = 0; lane < kLanes; ++lane)
      streams[lane] = derive_stream(kSimulationDomain, point_id, static_cast<std::uint64_t>(g * kLanes + lane));
    kernels::ArLanes lanes(params, -horizon);
    thread_local std::vector<double> buffer;
    buffer.resize(kChunkDraws * kLanes);
    std::int64_t done = 0;
    std::uint64_t block = 0;
    while (done < total) {
      fill_lanes(model, key, streams.data(), block, chunk_blocks, buffer.data());
      const auto count = static_cast<std::size_t>(std::min<std::int64_t>(total - done, kChunkDraws));
      table.ar_sweep(params, lanes, buffer.data(), count);
      done += static_cast<std::int64_t>(count);
      block += chunk_blocks;
    }
    for (int lane = 0; lane < kLanes; ++lane) {
      const std::int64_t r = g * kLanes + lane;
      if (r >= replicates) break;
      PathSummary& s = out[static_cast<std::size_t>(r)];
      s.cov.resize(lags);
      s.gap.resize(lags);
      s.head.resize(lags);
      s.tail.resize(lags);
      for (std::size_t l = 0; l < lags; ++l) {
        s.cov[l] = lanes.cov[l][lane];
        s.gap[l] = lanes.gap[l][lane];
        s.head[l] = lanes.head[l][lane];
        s.tail[l] = lanes.hist_x[l][lane];
      }
      s.ls_num = lanes.ls_num[lane];
      s.ls_den = lanes.ls_den[lane];
    }
  });
  return out;
}

const char* to_string(StatKind kind) {
  switch (kind) {
    case StatKind::covariance: return "covariance";
    case StatKind::linear: return "linear";
    case StatKind::estimator_ls: return "estimator-ls";
    case StatKind::estimator_yw: return "estimator-yw";
    case StatKind::boundary: return "boundary";
    case StatKind::gap: return "gap";
  }
  return "?";
}

StatKind parse_stat_kind(const std::string& text) {
  for (StatKind k : {StatKind::covariance, StatKind::linear, StatKind::estimator_ls, StatKind::estimator_yw,
                     StatKind::boundary, StatKind::gap})
    if (text == to_string(k)) return k;
  throw ConfigError("unknown statistic kind '" + text + "'");
}

int StatSpec::max_lag() const {
  switch (kind) {
    case StatKind::linear: return static_cast<int>(coefficients.size()) - 1;
    case StatKind::estimator_ls:
    case StatKind::estimator_yw: return 0;
    default: return lag;
  }
}

std::string StatSpec::label() const {
  switch (kind) {
    case StatKind::covariance:
    case StatKind::boundary:
    case StatKind::gap: return std::string(to_string(kind)) + "_l" + std::to_string(lag);
    default: return to_string(kind);
  }
}

double statistic(const StatSpec& spec, const PathSummary& path, const SchedulePoint& point, double second_moment) {
  const double theta = point.theta;
  const std::int64_t n = point.n;
  const double one_minus = 1.0 - theta * theta;
  switch (spec.kind) {
    case StatKind::covariance: {
      const std::int64_t l = spec.lag;
      const double empirical = path.cov[static_cast<std::size_t>(l)] / static_cast<double>(n - l);
      return scaled_covariance_deviation(empirical, theoretical_covariance(theta, l, second_moment), theta, n, l,
                                         point.b, true);
    }
    case StatKind::linear: {
      double acc = 0.0;
      std::int64_t top = 0;
      for (std::size_t l = 0; l < spec.coefficients.size(); ++l) {
        const auto li = static_cast<std::int64_t>(l);
        const double dev = path.cov[l] / static_cast<double>(n - li) - theoretical_covariance(theta, li, second_moment);
        acc += spec.coefficients[l] * dev;
        if (spec.coefficients[l] != 0.0) top = li;
      }
      return scaled_covariance_deviation(acc, 0.0, theta, n, top, point.b, true);
    }
    case StatKind::estimator_ls: return scaled_estimator_deviation(path.ls(), theta, n, point.b);
    case StatKind::estimator_yw: return scaled_estimator_deviation(path.yw(), theta, n, point.b);
    case StatKind::boundary: {
      const auto l = static_cast<std::size_t>(spec.lag);
      const double diff = path.head[l] * path.head[0] - path.tail[0] * path.tail[l];
      return std::sqrt(one_minus) * std::abs(diff) / (point.b * std::sqrt(static_cast<double>(n - spec.lag)));
    }
    case StatKind::gap:
      return std::sqrt(one_minus) / (point.b * std::sqrt(static_cast<double>(n - spec.lag))) *
             std::abs(path.gap[static_cast<std::size_t>(spec.lag)]);
  }
  return 0.0;
}

double theoretical_rate(const StatSpec& spec, double r, double second_moment) {
  switch (spec.kind) {
    case StatKind::covariance: return rate_covariance(r, second_moment);
    case StatKind::linear: return rate_linear_combo(r, spec.coefficients, second_moment);
    case StatKind::estimator_ls:
    case StatKind::estimator_yw: return rate_estimator(r);
    default: return std::numeric_limits<double>::infinity();
  }
}

TailEstimate tail_estimate(const std::vector<double>& values, double r, double b, double theoretical) {
  TailEstimate t;
  t.r = r;
  t.replicates = static_cast<std::int64_t>(values.size());
  for (double v : values) t.hits += v >= r;
  t.p_hat = static_cast<double>(t.hits) / static_cast<double>(t.replicates);
  const auto ci = stats::wilson(t.hits, t.replicates);
  t.ci_low = std::min(ci.low, t.p_hat);
  t.ci_high = std::max(ci.high, t.p_hat);
  const double b2 = b * b;
  if (t.hits == 0) {
    t.lower_bound = true;
    t.empirical_rate = -std::log(1.0 / static_cast<double>(t.replicates)) / b2;
  } else {
    t.empirical_rate = t.hits == t.replicates ? 0.0 : -std::log(t.p_hat) / b2;
  }
  t.theoretical_rate = theoretical;
  return t;
}

double RateCurve::diagnostic() const {
  double worst = 0.0;
  for (const auto& c : cells) {
    if (c.hits == 0 || !std::isfinite(c.theoretical_rate)) continue;
    if (c.ci_high - c.ci_low < c.p_hat) worst = std::max(worst, std::abs(c.ratio() - 1.0));
  }
  return worst;
}

namespace {

void validate_request(const CurveRequest& request, double second_moment) {
  if (request.r_grid.empty()) throw ConfigError("r grid is empty");
  for (std::size_t i = 0; i < request.r_grid.size(); ++i) {
    if (!(request.r_grid[i] > 0.0)) throw ConfigError("r grid values must be positive");
    if (i > 0 && !(request.r_grid[i] > request.r_grid[i - 1])) throw ConfigError("r grid must be strictly increasing");
  }
  if (request.specs.empty()) throw ConfigError("no statistics requested");
  for (const auto& spec : request.specs) {
    if (spec.kind == StatKind::linear) {
      if (spec.coefficients.empty()) throw ConfigError("linear statistic needs coefficients");
      (void)rate_linear_combo(1.0, spec.coefficients, second_moment);
    }
    if (spec.lag < 0) throw ConfigError("lag must be >= 0");
    if (spec.max_lag() > kernels::kMaxLag) throw ConfigError("lag exceeds engine limit");
  }
}

}  // namespace

std::vector<RateCurve> rate_curves(const Schedule& schedule, const NoiseModel& model, const CurveRequest& request,
                                   const EngineOptions& options) {
  const double s2 = model.second_moment();
  validate_request(request, s2);
  int max_lag = 0;
  for (const auto& spec : request.specs) max_lag = std::max(max_lag, spec.max_lag());
  std::vector<RateCurve> curves;
  for (std::size_t i = 0; i < schedule.points.size(); ++i) {
    const auto& point = schedule.points[i];
    const auto paths = simulate_point(point, i, model, max_lag, request.replicates, options);
    for (const auto& spec : request.specs)
      curves.push_back(curve_from_values(i, point, spec, statistic_values(spec, paths, point, s2), request.r_grid, s2));
  }
  return curves;
}

std::vector<double> statistic_values(const StatSpec& spec, const std::vector<PathSummary>& paths,
                                     const SchedulePoint& point, double second_moment) {
  std::vector<double> values(paths.size());
  for (std::size_t k = 0; k < paths.size(); ++k) values[k] = statistic(spec, paths[k], point, second_moment);
  return values;
}

RateCurve curve_from_values(std::size_t point_index, const SchedulePoint& point, const StatSpec& spec,
                            const std::vector<double>& values, const std::vector<double>& r_grid, double second_moment) {
  RateCurve curve{point_index, point, spec, {}};
  for (double r : r_grid)
    curve.cells.push_back(tail_estimate(values, r, point.b, theoretical_rate(spec, r, second_moment)));
  return curve;
}

TailEstimate tail_probability(const StatSpec& spec, const SchedulePoint& point, double r, const NoiseModel& model,
                              std::int64_t replicates, const EngineOptions& options, std::uint64_t point_id) {
  if (replicates < 1000) throw ConfigError("tail probability needs replicates >= 1000");
  validate_request({{spec}, {r}, replicates}, model.second_moment());
  const auto paths = simulate_point(point, point_id, model, spec.max_lag(), replicates, options);
  std::vector<double> values(paths.size());
  for (std::size_t k = 0; k < paths.size(); ++k) values[k] = statistic(spec, paths[k], point, model.second_moment());
  return tail_estimate(values, r, point.b, theoretical_rate(spec, r, model.second_moment()));
}

BandCheck band_check(const std::vector<RateCurve>& curves, const BandRule& rule) {
  BandCheck out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& curve : curves) {
    double worst = nan, lo = nan, hi = nan;
    const double b2 = curve.point.b * curve.point.b;
    for (const auto& c : curve.cells) {
      if (c.hits == 0 || c.p_hat < rule.p_low || c.p_hat > rule.p_high) continue;
      ++out.cells_in_band;
      const double ratio = c.ratio();
      if (!(ratio >= rule.ratio_low && ratio <= rule.ratio_high)) ++out.cells_outside_ratio;
      const double d = std::abs(ratio - 1.0);
      if (std::isnan(worst) || d > worst) {
        worst = d;
        const double r_lo = -std::log(c.ci_high) / b2 / c.theoretical_rate;
        const double r_hi = -std::log(c.ci_low) / b2 / c.theoretical_rate;
        lo = (r_lo <= 1.0 && 1.0 <= r_hi) ? 0.0 : std::min(std::abs(r_lo - 1.0), std::abs(r_hi - 1.0));
        hi = std::max(std::abs(r_lo - 1.0), std::abs(r_hi - 1.0));
      }
    }
    out.worst.push_back(worst);
    out.worst_low.push_back(lo);
    out.worst_high.push_back(hi);
  }
  out.ratios_ok = out.cells_in_band > 0 && out.cells_outside_ratio == 0;
  int compared = 0;
  bool trend = true;
  std::size_t prev = out.worst.size();
  for (std::size_t i = 0; i < out.worst.size(); ++i) {
    if (std::isnan(out.worst[i])) continue;
    if (prev < out.worst.size()) {
      ++compared;
      if (!(out.worst[i] <= out.worst[prev] || out.worst_low[i] <= out.worst_high[prev])) trend = false;
    }
    prev = i;
  }
  out.trend_ok = trend && compared >= 1;
  return out;
}

CltResult clt_check(double theta, std::int64_t n, std::int64_t replicates, const NoiseModel& model,
                    const EngineOptions& options) {
  const SchedulePoint point{n, theta, 1.0, 2};
  const auto paths = simulate_point(point, kCltPoint, model, 0, replicates, options);
  std::vector<double> z(paths.size());
  const double scale = std::sqrt(static_cast<double>(n)) / std::sqrt(1.0 - theta * theta);
  for (std::size_t k = 0; k < paths.size(); ++k) z[k] = scale * (paths[k].ls() - theta);
  CltResult out;
  out.ks = stats::ks_normal(std::move(z));
  out.critical_5 = stats::ks_critical_5(replicates);
  out.n_one_minus_theta = static_cast<double>(n) * (1.0 - theta);
  out.replicates = replicates;
  out.low_power = replicates < 1000;
  return out;
}

std::vector<VarianceRow> variance_convergence(const Schedule& schedule, int l, const NoiseModel& model,
                                              std::int64_t mc_replicates, const EngineOptions& options) {
  std::vector<VarianceRow> rows;
  const double s2 = model.second_moment();
  for (std::size_t i = 0; i < schedule.points.size(); ++i) {
    const auto& p = schedule.points[i];
    const UWindow w = UWindow::make(std::max(1, l), p.m, p.theta, model, l);
    VarianceRow row;
    row.point = p;
    row.l = l;
    const double one_minus = 1.0 - p.theta * p.theta;
    row.exact = one_minus / p.m * block_variance_exact(l, w);
    row.target = 4.0 * s2 * s2;
    row.relative = std::abs(row.exact / row.target - 1.0);
    if (mc_replicates > 0) {
      const int m = p.m;
      const double theta = p.theta;
      const double tail_w = std::pow(theta, m - 1);
      const double centre = std::pow(theta, l) * s2;
      std::vector<double> sums(static_cast<std::size_t>(mc_replicates));
      stats::parallel_for(mc_replicates, options.workers, [&](std::int64_t r) {
        const StreamId sid{options.seed, derive_stream(kBlockDomain, i * 16 + static_cast<std::uint64_t>(l),
                                                       static_cast<std::uint64_t>(r))};
        // xi[t] = xi_{t+2-m}, t = 0 .. 2m+l-2
        const auto xi = sample(model, static_cast<std::size_t>(2 * m + l - 1), sid);
        auto e = [&](int k) { return xi[static_cast<std::size_t>(k + m - 2)]; };
        // xm[i] = X_{i,m} = sum_{j=0}^{m-2} theta^j xi_{i-j}, i = 0 .. m+l-1
        std::vector<double> xm(static_cast<std::size_t>(m + l));
        double acc = 0.0, pw = 1.0;
        for (int j = 0; j <= m - 2; ++j, pw *= theta) acc += pw * e(-j);
        xm[0] = acc;
        for (int t = 1; t < m + l; ++t)
          xm[static_cast<std::size_t>(t)] = theta * xm[static_cast<std::size_t>(t - 1)] + e(t) - tail_w * e(t - m + 1);
        double s = 0.0;
        for (int k = 1; k <= m; ++k)
          s += theta * e(k) * xm[static_cast<std::size_t>(k + l - 1)] + theta * e(k + l) * xm[static_cast<std::size_t>(k - 1)] +
               e(k + l) * e(k) - centre;
        sums[static_cast<std::size_t>(r)] = s;
      });
      const double R = static_cast<double>(mc_replicates);
      double mean = 0.0;
      for (double v : sums) mean += v;
      mean /= R;
      double m2 = 0.0, m4 = 0.0;
      for (double v : sums) {
        const double d2 = (v - mean) * (v - mean);
        m2 += d2;
        m4 += d2 * d2;
      }
      m2 /= R;
      m4 /= R;
      row.mc = one_minus / m * m2;
      row.mc_se = one_minus / m * std::sqrt(std::max(0.0, m4 - m2 * m2) / R);
    }
    rows.push_back(row);
  }
  return rows;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  const std::size_t idx = std::min(values.size() - 1, k == 0 ? 0 : k - 1);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
  return values[idx];
}

namespace {

bool super_mdp_trend(const std::vector<TailEstimate>& cells) {
  bool all_zero = true;
  for (const auto& c : cells) all_zero = all_zero && c.hits == 0;
  if (all_zero) return true;
  if (cells.size() < 2) return false;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const auto &a = cells[i - 1], &b = cells[i];
    if (a.hits == 0) return false;  // only a lower bound, increase not established
    if (!(b.empirical_rate > a.empirical_rate)) return false;  // zero-hit b: its bound must already exceed a
  }
  return true;
}

}  // namespace

NegligibilityTable negligibility_from_values(const Schedule& schedule, double r,
                                             const std::vector<std::vector<double>>& boundary,
                                             const std::vector<std::vector<double>>& gap) {
  NegligibilityTable t;
  std::vector<TailEstimate> bc, gc;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < schedule.points.size(); ++i) {
    const auto& p = schedule.points[i];
    NegligibilityRow rb{p, StatKind::boundary, tail_estimate(boundary[i], r, p.b, inf), quantile(boundary[i], 0.999)};
    NegligibilityRow rg{p, StatKind::gap, tail_estimate(gap[i], r, p.b, inf), quantile(gap[i], 0.999)};
    bc.push_back(rb.tail);
    gc.push_back(rg.tail);
    t.rows.push_back(rb);
    t.rows.push_back(rg);
  }
  t.boundary_increasing = super_mdp_trend(bc);
  t.gap_increasing = super_mdp_trend(gc);
  return t;
}

NegligibilityTable boundary_negligibility(const Schedule& schedule, int l, double r, const NoiseModel& model,
                                          std::int64_t replicates, const EngineOptions& options) {
  if (!(r > 0.0)) throw ConfigError("negligibility threshold r must be positive");
  std::vector<std::vector<double>> boundary, gap;
  const StatSpec bs{StatKind::boundary, l, {}}, gs{StatKind::gap, l, {}};
  for (std::size_t i = 0; i < schedule.points.size(); ++i) {
    const auto& p = schedule.points[i];
    const auto paths = simulate_point(p, i, model, l, replicates, options);
    std::vector<double> b(paths.size()), g(paths.size());
    for (std::size_t k = 0; k < paths.size(); ++k) {
      b[k] = statistic(bs, paths[k], p, model.second_moment());
      g[k] = statistic(gs, paths[k], p, model.second_moment());
    }
    boundary.push_back(std::move(b));
    gap.push_back(std::move(g));
  }
  return negligibility_from_values(schedule, r, boundary, gap);
}

}  // namespace mdp
