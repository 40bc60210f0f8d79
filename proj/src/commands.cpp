#include "mdp/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mdp/ar1.hpp"
#include "mdp/blocking.hpp"
#include "mdp/csv.hpp"
#include "mdp/error.hpp"
#include "mdp/estimators.hpp"
#include "mdp/kernels.hpp"

namespace mdp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kPathDomain = 0x9A7;

fs::path output_dir(const ExperimentConfig& c) {
  const fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + c.output_dir + "'");
  return dir;
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + file.string() + "'");
  return out;
}

void write_summary(const fs::path& dir, const std::string& command, const ExperimentConfig& c, json extra) {
  json j{{"run_id", run_id(command, c)}, {"command", command}, {"kernels", kernels::active_table().name},
         {"config", to_json(c)}};
  for (auto& item : extra.items()) j[item.key()] = item.value();
  auto out = open_out(dir / (command + "_summary.json"));
  out << j.dump(2) << '\n';
}

std::string point_fields(const SchedulePoint& p) {
  return csv::num(p.n) + "," + csv::num(p.theta) + "," + csv::num(p.b) + "," + csv::num(p.m);
}

}  // namespace

int guarded(std::ostream& err, const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const ScheduleInvalidError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const DegenerateRateError& e) {
    err << "error: degenerate rate: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kConfigError;
}

int cmd_simulate(const ExperimentConfig& c, std::ostream& log) {
  const auto dir = output_dir(c);
  const NoiseModel model = c.noise_model();
  InitSpec init;
  init.policy = c.simulate.init == "exact" ? InitPolicy::exact_gaussian : InitPolicy::truncated_series;
  for (std::int64_t i = 0; i < c.simulate.paths; ++i) {
    const StreamId sid{c.master_seed, derive_stream(kPathDomain, 0, static_cast<std::uint64_t>(i))};
    const auto path = simulate(c.simulate.theta, c.simulate.n, model, sid, init);
    auto out = open_out(dir / ("path_" + std::to_string(i) + ".csv"));
    write_path_csv(out, path);
  }
  log << "wrote " << c.simulate.paths << " path file(s) to " << dir.string() << '\n';
  write_summary(dir, "simulate", c, json::object());
  return kOk;
}

int cmd_estimate(const ExperimentConfig& c, std::ostream& log) {
  const auto dir = output_dir(c);
  const NoiseModel model = c.noise_model();
  InitSpec init;
  init.policy = c.simulate.init == "exact" ? InitPolicy::exact_gaussian : InitPolicy::truncated_series;
  auto out = open_out(dir / "estimates.csv");
  out << "path,n,theta,ls,yw,l,empirical,theoretical\n";
  for (std::int64_t i = 0; i < c.simulate.paths; ++i) {
    const StreamId sid{c.master_seed, derive_stream(kPathDomain, 0, static_cast<std::uint64_t>(i))};
    const auto path = simulate(c.simulate.theta, c.simulate.n, model, sid, init);
    const double ls = ls_estimate(path), yw = yw_estimate(path);
    for (int l : c.lags)
      csv::row(out, {csv::num(i), csv::num(c.simulate.n), csv::num(c.simulate.theta), csv::num(ls), csv::num(yw),
                     csv::num(l), csv::num(empirical_covariance(path, l)),
                     csv::num(theoretical_covariance(c.simulate.theta, l, model.second_moment()))});
  }
  log << "wrote estimates for " << c.simulate.paths << " path(s) to " << (dir / "estimates.csv").string() << '\n';
  write_summary(dir, "estimate", c, json::object());
  return kOk;
}

int cmd_verify_moments(const ExperimentConfig& c, std::ostream& log, const ClosedFormFn& closed) {
  const auto dir = output_dir(c);
  SweepSpec spec = c.moments;
  spec.workers = stats::resolve_workers(c.workers);
  const VerifyReport report = verify_moments(spec, closed);
  auto out = open_out(dir / "moments_verify.csv");
  write_verify_csv(out, report);
  log << report.rows.size() << " moment checks: " << report.failures << " failed, " << report.skipped
      << " skipped, " << report.findings << " printed-aggregate disagreements logged\n";
  if (report.skipped > 0) log << "warning: " << report.skipped << " rows exceeded the enumeration guard\n";
  write_summary(dir, "moments_verify", c,
                {{"rows", report.rows.size()}, {"failures", report.failures}, {"skipped", report.skipped},
                 {"findings", report.findings}});
  return report.failures > 0 ? kVerificationFailure : kOk;
}

void write_curve_csv(std::ostream& out, const std::vector<RateCurve>& curves) {
  out << "n,theta,b,m,kind,r,hits,replicates,p_hat,ci_low,ci_high,empirical_rate,theoretical_rate\n";
  for (const auto& curve : curves)
    for (const auto& cell : curve.cells)
      csv::row(out, {point_fields(curve.point), to_string(curve.spec.kind), csv::num(cell.r), csv::num(cell.hits),
                     csv::num(cell.replicates), csv::num(cell.p_hat), csv::num(cell.ci_low), csv::num(cell.ci_high),
                     csv::num(cell.empirical_rate), csv::num(cell.theoretical_rate)});
}

int cmd_curve(const ExperimentConfig& c, std::ostream& log) {
  const NoiseModel model = c.noise_model();
  const Schedule schedule = c.make_schedule();
  CurveRequest request{c.stat_specs(), c.r_grid, c.replicates};
  for (const auto& spec : request.specs)
    if (spec.kind == StatKind::linear) (void)rate_linear_combo(1.0, spec.coefficients, model.second_moment());
  const auto dir = output_dir(c);
  const auto curves = rate_curves(schedule, model, request, c.engine());
  json summary = json::array();
  for (std::size_t s = 0; s < request.specs.size(); ++s) {
    const auto& spec = request.specs[s];
    std::vector<RateCurve> mine;
    for (std::size_t i = s; i < curves.size(); i += request.specs.size()) mine.push_back(curves[i]);
    auto out = open_out(dir / ("curve_" + spec.label() + ".csv"));
    write_curve_csv(out, mine);
    json points = json::array();
    for (const auto& curve : mine) {
      json zero_hit = json::array();
      for (const auto& cell : curve.cells)
        if (cell.lower_bound) zero_hit.push_back(cell.r);
      points.push_back({{"n", curve.point.n}, {"diagnostic", curve.diagnostic()}, {"zero_hit_r", zero_hit}});
    }
    json entry{{"label", spec.label()}, {"kind", to_string(spec.kind)}, {"points", points}};
    if (spec.kind == StatKind::linear) entry["coefficients"] = spec.coefficients;
    if (spec.kind != StatKind::boundary && spec.kind != StatKind::gap) {
      const BandCheck band = band_check(mine);
      entry["band"] = {{"cells_in_band", band.cells_in_band}, {"cells_outside_ratio", band.cells_outside_ratio},
                       {"worst", band.worst}, {"ratios_ok", band.ratios_ok}, {"trend_ok", band.trend_ok}};
      log << spec.label() << ": " << band.cells_in_band << " band cells, " << band.cells_outside_ratio
          << " outside [0.5, 2], trend " << (band.trend_ok ? "ok" : "not ok") << '\n';
    }
    summary.push_back(entry);
  }
  write_summary(dir, "curve", c, {{"curves", summary}});
  log << "wrote " << request.specs.size() << " curve file(s) to " << dir.string() << '\n';
  return kOk;
}

int cmd_blocks(const ExperimentConfig& c, std::ostream& log) {
  const NoiseModel model = c.noise_model();
  const Schedule schedule = c.make_schedule();
  const auto dir = output_dir(c);
  const EngineOptions eng = c.engine();
  AbcdThresholds th;
  th.small = c.blocks.small;
  th.d_relative = c.blocks.d_relative;
  th.big_m = c.big_m;
  th.epsilon = c.epsilon;
  th.replicates = c.blocks.replicates;
  th.seed = c.master_seed;
  th.workers = eng.workers;
  bool inconclusive = false;
  {
    auto out = open_out(dir / "blocks.csv");
    out << "n,theta,b,m,p,condition,value,ci_low,ci_high,target,threshold,status,note\n";
    for (const auto& pt : schedule.points) {
      std::string p = "infeasible";
      try {
        p = csv::num(choose_p(pt.n, pt.m, pt.b, schedule.gamma_dep));
      } catch (const InfeasibleError&) {
      }
      const auto window = UWindow::make(c.m_max, pt.m, pt.theta, model, c.blocks.lag);
      for (const auto& row : check_abcd(pt, schedule.gamma_dep, window, model, th)) {
        inconclusive = inconclusive || row.status == CheckStatus::inconclusive;
        csv::row(out, {point_fields(pt), p, row.name, csv::num(row.value), csv::num(row.ci_low),
                       csv::num(row.ci_high), csv::num(row.target), csv::num(row.threshold), to_string(row.status),
                       csv::text(row.note)});
      }
    }
  }
  const auto mc = maximal_check(model, c.blocks.maximal_n, c.blocks.maximal_p, c.blocks.maximal_t, c.alpha0, c.beta0,
                                c.blocks.replicates, c.master_seed, eng.workers);
  {
    auto out = open_out(dir / "maximal.csv");
    out << "n,p,t,alpha0,beta0,bound,hits,replicates,p_hat,ci_low,ci_high,constants_valid\n";
    csv::row(out, {csv::num(c.blocks.maximal_n), csv::num(c.blocks.maximal_p), csv::num(c.blocks.maximal_t),
                   csv::num(c.alpha0), csv::num(c.beta0), csv::num(mc.bound), csv::num(mc.hits),
                   csv::num(mc.replicates), csv::num(mc.p_hat), csv::num(mc.ci.low), csv::num(mc.ci.high),
                   mc.constants_valid ? "true" : "false"});
  }
  {
    auto out = open_out(dir / "variance.csv");
    out << "n,theta,b,m,l,exact,mc,mc_se,target,relative\n";
    for (const auto& row :
         variance_convergence(schedule, c.blocks.lag, model, c.blocks.variance_replicates, eng))
      csv::row(out, {point_fields(row.point), csv::num(row.l), csv::num(row.exact), csv::num(row.mc),
                     csv::num(row.mc_se), csv::num(row.target), csv::num(row.relative)});
  }
  write_summary(dir, "blocks", c, {{"maximal_constants_valid", mc.constants_valid}, {"inconclusive", inconclusive}});
  log << "condition table written to " << (dir / "blocks.csv").string() << '\n';
  if (!mc.constants_valid) {
    log << "maximal inequality constants falsified: frequency " << mc.p_hat << " exceeds bound " << mc.bound << '\n';
    return kVerificationFailure;
  }
  if (inconclusive) {
    log << "some tail conditions are unresolved at this Monte Carlo budget\n";
    return kInconclusive;
  }
  return kOk;
}

int cmd_schedule(const ExperimentConfig& c, std::ostream& log) {
  const Schedule schedule = c.make_schedule();
  const auto dir = output_dir(c);
  auto out = open_out(dir / "schedule.csv");
  const char* header = "n,theta,b,m,signal,effective_n,window,window_log,block_growth,k_n,k_m,residual\n";
  out << header;
  log << header;
  for (std::size_t i = 0; i < schedule.points.size(); ++i) {
    const auto& p = schedule.points[i];
    const auto r = schedule.conditions(i);
    std::ostringstream line;
    csv::row(line, {point_fields(p), csv::num(r.signal), csv::num(r.effective_n), csv::num(r.window),
                    csv::num(r.window_log), csv::num(r.block_growth), csv::num(r.k_n), csv::num(r.k_m),
                    csv::num(r.residual)});
    out << line.str();
    log << line.str();
  }
  const TrendFlags f = schedule.trends();
  auto trends = open_out(dir / "schedule_trends.csv");
  trends << "quantity,required,holds\n";
  const std::pair<const char*, std::pair<const char*, bool>> rows[] = {
      {"signal", {"increasing", f.signal}},           {"effective_n", {"increasing", f.effective_n}},
      {"window", {"increasing", f.window}},           {"window_log", {"increasing", f.window_log}},
      {"block_growth", {"decreasing", f.block_growth}}, {"residual", {"decreasing", f.residual}}};
  for (const auto& [name, req] : rows) {
    csv::row(trends, {name, req.first, req.second ? "true" : "false"});
    log << name << " " << req.first << ": " << (req.second ? "yes" : "no") << '\n';
  }
  json extra{{"trends_all", f.all()}};
  if (schedule.generated) extra["exponent_margin"] = schedule.exponent_margin();
  write_summary(dir, "schedule", c, extra);
  return kOk;
}

int cmd_clt(const ExperimentConfig& c, std::ostream& log) {
  const NoiseModel model = c.noise_model();
  const auto dir = output_dir(c);
  const auto res = clt_check(c.clt.theta, c.clt.n, c.replicates, model, c.engine());
  auto out = open_out(dir / "clt.csv");
  out << "theta,n,n_one_minus_theta,replicates,ks,critical_5,low_power\n";
  csv::row(out, {csv::num(c.clt.theta), csv::num(c.clt.n), csv::num(res.n_one_minus_theta), csv::num(res.replicates),
                 csv::num(res.ks), csv::num(res.critical_5), res.low_power ? "true" : "false"});
  log << "KS distance " << res.ks << " (5% critical " << res.critical_5 << ")"
      << (res.low_power ? ", low power" : "") << '\n';
  write_summary(dir, "clt", c, {{"ks", res.ks}, {"low_power", res.low_power}});
  return kOk;
}

}  // namespace mdp::cli
