#include "mdp/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "mdp/error.hpp"
#include "mdp/kernels.hpp"

namespace mdp {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items())
    if (!ok.count(item.key()))
      throw ConfigError("unknown config key '" + (where.empty() ? "" : where + ".") + item.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + (where.empty() ? "" : where + ".") + key + "' has the wrong type");
  }
}

Rational parse_rational(const json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return {std::stoll(s), 1};
      return {std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1))};
    } catch (const std::exception&) {
      throw ConfigError("probability '" + s + "' is not a fraction");
    }
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer())
    return {v[0].get<std::int64_t>(), v[1].get<std::int64_t>()};
  throw ConfigError("probabilities must be \"p/q\" strings or [p, q] pairs");
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  reject_unknown(j, {"noise", "schedule", "m_max", "lags", "coefficients", "kinds", "r_grid", "replicates",
                     "master_seed", "workers", "tau", "alpha0", "beta0", "gamma_dep", "big_m", "epsilon",
                     "output_dir", "simulate", "clt", "blocks", "moments"},
                 "");
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    reject_unknown(n, {"kind", "sigma", "a", "support", "probabilities"}, "noise");
    read(n, "kind", c.noise.kind, "noise");
    read(n, "sigma", c.noise.sigma, "noise");
    read(n, "a", c.noise.a, "noise");
    read(n, "support", c.noise.support, "noise");
    if (n.contains("probabilities")) {
      if (!n.at("probabilities").is_array()) throw ConfigError("noise.probabilities must be a list");
      for (const auto& p : n.at("probabilities")) c.noise.probabilities.push_back(parse_rational(p));
    }
  }
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    reject_unknown(s, {"beta", "gamma_b", "n", "m_exponent", "points"}, "schedule");
    read(s, "beta", c.schedule.beta, "schedule");
    read(s, "gamma_b", c.schedule.gamma_b, "schedule");
    read(s, "n", c.schedule.n, "schedule");
    read(s, "m_exponent", c.schedule.m_exponent, "schedule");
    if (s.contains("points")) {
      if (!s.at("points").is_array()) throw ConfigError("schedule.points must be a list");
      for (const auto& p : s.at("points")) {
        reject_unknown(p, {"n", "theta", "b", "m"}, "schedule.points");
        SchedulePoint pt;
        for (const char* key : {"n", "theta", "b", "m"})
          if (!p.contains(key)) throw ConfigError(std::string("schedule.points entry lacks '") + key + "'");
        read(p, "n", pt.n, "schedule.points");
        read(p, "theta", pt.theta, "schedule.points");
        read(p, "b", pt.b, "schedule.points");
        read(p, "m", pt.m, "schedule.points");
        c.schedule.points.push_back(pt);
      }
    }
  }
  read(j, "m_max", c.m_max, "");
  read(j, "lags", c.lags, "");
  read(j, "coefficients", c.coefficients, "");
  read(j, "kinds", c.kinds, "");
  read(j, "r_grid", c.r_grid, "");
  read(j, "replicates", c.replicates, "");
  read(j, "master_seed", c.master_seed, "");
  read(j, "workers", c.workers, "");
  read(j, "tau", c.tau, "");
  read(j, "alpha0", c.alpha0, "");
  read(j, "beta0", c.beta0, "");
  read(j, "gamma_dep", c.gamma_dep, "");
  read(j, "big_m", c.big_m, "");
  read(j, "epsilon", c.epsilon, "");
  read(j, "output_dir", c.output_dir, "");
  if (j.contains("simulate")) {
    const json& s = j.at("simulate");
    reject_unknown(s, {"n", "theta", "paths", "init"}, "simulate");
    read(s, "n", c.simulate.n, "simulate");
    read(s, "theta", c.simulate.theta, "simulate");
    read(s, "paths", c.simulate.paths, "simulate");
    read(s, "init", c.simulate.init, "simulate");
  }
  if (j.contains("clt")) {
    const json& s = j.at("clt");
    reject_unknown(s, {"theta", "n"}, "clt");
    read(s, "theta", c.clt.theta, "clt");
    read(s, "n", c.clt.n, "clt");
  }
  if (j.contains("blocks")) {
    const json& s = j.at("blocks");
    reject_unknown(s, {"lag", "replicates", "small", "d_relative", "maximal_t", "maximal_n", "maximal_p",
                       "variance_replicates"},
                   "blocks");
    read(s, "lag", c.blocks.lag, "blocks");
    read(s, "replicates", c.blocks.replicates, "blocks");
    read(s, "small", c.blocks.small, "blocks");
    read(s, "d_relative", c.blocks.d_relative, "blocks");
    read(s, "maximal_t", c.blocks.maximal_t, "blocks");
    read(s, "maximal_n", c.blocks.maximal_n, "blocks");
    read(s, "maximal_p", c.blocks.maximal_p, "blocks");
    read(s, "variance_replicates", c.blocks.variance_replicates, "blocks");
  }
  if (j.contains("moments")) {
    const json& s = j.at("moments");
    reject_unknown(s, {"m_max_values", "m_span", "thetas", "laws", "tolerance"}, "moments");
    read(s, "m_max_values", c.moments.m_max_values, "moments");
    read(s, "m_span", c.moments.m_span, "moments");
    read(s, "thetas", c.moments.thetas, "moments");
    read(s, "laws", c.moments.laws, "moments");
    read(s, "tolerance", c.moments.tolerance, "moments");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

ExperimentConfig resolve_config(const std::optional<std::string>& path, const Overrides& flags) {
  ExperimentConfig c = path ? load_config(*path) : ExperimentConfig{};
  if (const char* env = std::getenv("MDP_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw ConfigError(std::string("MDP_SEED='") + env + "' is not an unsigned integer");
    c.master_seed = v;
  }
  if (flags.seed) c.master_seed = *flags.seed;
  if (flags.workers) c.workers = *flags.workers;
  if (flags.out) c.output_dir = *flags.out;
  if (flags.replicates) c.replicates = *flags.replicates;
  c.validate();
  return c;
}

NoiseModel ExperimentConfig::noise_model() const {
  const auto& n = noise;
  if (n.kind == "normal") {
    if (!(n.sigma > 0.0)) throw ConfigError("noise.sigma must be positive");
    return NoiseModel::normal(n.sigma);
  }
  if (n.kind == "rademacher") return NoiseModel::rademacher();
  if (n.kind == "three-point") return NoiseModel::three_point();
  if (n.kind == "uniform") {
    if (!(n.a > 0.0)) throw ConfigError("noise.a must be positive");
    return NoiseModel::uniform(n.a);
  }
  if (n.kind == "discrete") return NoiseModel::discrete(n.support, n.probabilities);
  throw ConfigError("unknown noise.kind '" + n.kind + "'");
}

Schedule ExperimentConfig::make_schedule() const {
  if (!schedule.points.empty()) return explicit_schedule(schedule.points, gamma_dep, m_max);
  return mdp::make_schedule(schedule.beta, schedule.gamma_b, schedule.n, schedule.m_exponent, gamma_dep, m_max);
}

std::vector<StatSpec> ExperimentConfig::stat_specs() const {
  std::vector<StatSpec> specs;
  for (const auto& k : kinds) {
    const StatKind kind = parse_stat_kind(k);
    switch (kind) {
      case StatKind::covariance:
      case StatKind::boundary:
      case StatKind::gap:
        for (int l : lags) specs.push_back({kind, l, {}});
        break;
      case StatKind::linear: specs.push_back({kind, 0, coefficients}); break;
      default: specs.push_back({kind, 0, {}});
    }
  }
  return specs;
}

EngineOptions ExperimentConfig::engine() const { return {master_seed, stats::resolve_workers(workers), 1e-12}; }

void ExperimentConfig::validate() const {
  (void)noise_model();
  if (m_max < 1) throw ConfigError("m_max must be >= 1");
  if (m_max > kernels::kMaxLag) throw ConfigError("m_max exceeds the engine lag limit");
  if (lags.empty()) throw ConfigError("lags must not be empty");
  for (int l : lags)
    if (l < 0 || l > m_max) throw ConfigError("every lag must lie in [0, m_max]");
  if (!coefficients.empty() && static_cast<int>(coefficients.size()) > m_max + 1)
    throw ConfigError("coefficients may have at most m_max + 1 entries");
  if (kinds.empty()) throw ConfigError("kinds must not be empty");
  for (const auto& k : kinds) (void)parse_stat_kind(k);
  if (r_grid.empty()) throw ConfigError("r_grid must not be empty");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > 0.0)) throw ConfigError("r_grid values must be positive");
    if (i > 0 && !(r_grid[i] > r_grid[i - 1])) throw ConfigError("r_grid must be strictly increasing");
  }
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(alpha0 > 0.0) || !(beta0 > 0.0)) throw ConfigError("alpha0 and beta0 must be positive");
  if (!(gamma_dep > 0.0 && gamma_dep < 1.0)) throw ConfigError("gamma_dep must lie in (0, 1)");
  if (!(big_m > 0.0) || !(epsilon > 0.0)) throw ConfigError("big_m and epsilon must be positive");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  if (simulate.n < 1 || simulate.paths < 1) throw ConfigError("simulate.n and simulate.paths must be >= 1");
  if (!(simulate.theta >= 0.0 && simulate.theta < 1.0)) throw ConfigError("simulate.theta must lie in [0, 1)");
  if (simulate.init != "truncated" && simulate.init != "exact")
    throw ConfigError("simulate.init must be 'truncated' or 'exact'");
  if (!(clt.theta >= 0.0 && clt.theta < 1.0) || clt.n < 2) throw ConfigError("clt needs theta in [0, 1), n >= 2");
  if (blocks.lag < 0 || blocks.lag > m_max) throw ConfigError("blocks.lag must lie in [0, m_max]");
  if (blocks.replicates < 1 || blocks.maximal_n < 1 || blocks.maximal_p < 1 || blocks.variance_replicates < 0)
    throw ConfigError("blocks counts must be positive");
  if (!(blocks.maximal_t >= 0.0)) throw ConfigError("blocks.maximal_t must be >= 0");
  if (moments.m_span < 1 || moments.m_max_values.empty()) throw ConfigError("moments sweep is empty");
  for (const auto& law : moments.laws) (void)finite_law(law);
  for (double t : moments.thetas)
    if (!(t >= 0.0 && t < 1.0)) throw ConfigError("moments.thetas must lie in [0, 1)");
  if (!schedule.points.empty()) {
    (void)explicit_schedule(schedule.points, gamma_dep, m_max);
  } else {
    if (!(schedule.beta > 0.0) || !(schedule.gamma_b > 0.0)) throw ConfigError("schedule beta, gamma_b must be positive");
    if (schedule.n.empty()) throw ConfigError("schedule.n must not be empty");
  }
}

json to_json(const ExperimentConfig& c) {
  json noise{{"kind", c.noise.kind}, {"sigma", c.noise.sigma}, {"a", c.noise.a}, {"support", c.noise.support}};
  json probs = json::array();
  for (const auto& p : c.noise.probabilities) probs.push_back(std::to_string(p.num) + "/" + std::to_string(p.den));
  noise["probabilities"] = probs;
  json schedule{{"beta", c.schedule.beta}, {"gamma_b", c.schedule.gamma_b}, {"n", c.schedule.n},
                {"m_exponent", c.schedule.m_exponent}};
  json points = json::array();
  for (const auto& p : c.schedule.points) points.push_back({{"n", p.n}, {"theta", p.theta}, {"b", p.b}, {"m", p.m}});
  schedule["points"] = points;
  return json{{"noise", noise},
              {"schedule", schedule},
              {"m_max", c.m_max},
              {"lags", c.lags},
              {"coefficients", c.coefficients},
              {"kinds", c.kinds},
              {"r_grid", c.r_grid},
              {"replicates", c.replicates},
              {"master_seed", c.master_seed},
              {"workers", c.workers},
              {"tau", c.tau},
              {"alpha0", c.alpha0},
              {"beta0", c.beta0},
              {"gamma_dep", c.gamma_dep},
              {"big_m", c.big_m},
              {"epsilon", c.epsilon},
              {"output_dir", c.output_dir},
              {"simulate", {{"n", c.simulate.n}, {"theta", c.simulate.theta}, {"paths", c.simulate.paths},
                            {"init", c.simulate.init}}},
              {"clt", {{"theta", c.clt.theta}, {"n", c.clt.n}}},
              {"blocks", {{"lag", c.blocks.lag}, {"replicates", c.blocks.replicates}, {"small", c.blocks.small},
                          {"d_relative", c.blocks.d_relative}, {"maximal_t", c.blocks.maximal_t},
                          {"maximal_n", c.blocks.maximal_n}, {"maximal_p", c.blocks.maximal_p},
                          {"variance_replicates", c.blocks.variance_replicates}}},
              {"moments", {{"m_max_values", c.moments.m_max_values}, {"m_span", c.moments.m_span},
                           {"thetas", c.moments.thetas}, {"laws", c.moments.laws},
                           {"tolerance", c.moments.tolerance}}}};
}

std::string run_id(const std::string& command, const ExperimentConfig& c) {
  json j = to_json(c);
  j.erase("workers");
  const std::string text = command + "\n" + j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) h = (h ^ ch) * 0x100000001b3ull;
  h = splitmix64(h);
  std::ostringstream os;
  os << std::hex;
  os.width(12);
  os.fill('0');
  os << (h >> 16);
  return os.str();
}

}  // namespace mdp
