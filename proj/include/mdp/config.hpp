#pragma once

// Experiment configuration: JSON file, then MDP_SEED, then command-line flags.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdp/blocking.hpp"
#include "mdp/mdpcore.hpp"
#include "mdp/montecarlo.hpp"
#include "mdp/noise.hpp"
#include "mdp/verify.hpp"

namespace mdp {

struct NoiseSpec {
  std::string kind = "normal";  ///< normal | rademacher | uniform | three-point | discrete
  double sigma = 1.0;
  double a = 1.0;
  std::vector<double> support;
  std::vector<Rational> probabilities;
};

struct ScheduleSpec {
  double beta = 0.15;
  double gamma_b = 0.05;
  std::vector<std::int64_t> n{10000, 50000, 200000};
  double m_exponent = 1.2;
  std::vector<SchedulePoint> points;  ///< explicit points replace the power law when non-empty
};

struct SimulateSpec {
  std::int64_t n = 1000;
  double theta = 0.9;
  std::int64_t paths = 1;
  std::string init = "truncated";  ///< truncated | exact
};

struct CltSpec {
  double theta = 0.99;
  std::int64_t n = 10000;
};

struct BlocksSpec {
  int lag = 0;
  std::int64_t replicates = 10000;
  double small = 0.05;
  double d_relative = 0.1;
  double maximal_t = 500.0;
  std::int64_t maximal_n = 10000;
  int maximal_p = 1;
  std::int64_t variance_replicates = 2000;
};

struct ExperimentConfig {
  NoiseSpec noise;
  ScheduleSpec schedule;
  int m_max = 1;
  std::vector<int> lags{0, 1};
  std::vector<double> coefficients{0.5, 0.5};
  std::vector<std::string> kinds{"covariance"};
  std::vector<double> r_grid{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0};
  std::int64_t replicates = 1000;
  std::uint64_t master_seed = 0;
  int workers = 0;  ///< 0 = all cores
  double tau = 1.0;
  double alpha0 = 4.0;
  double beta0 = 2.0;
  double gamma_dep = 2.0 / 3.0;
  double big_m = 1.0;
  double epsilon = 1.0;
  std::string output_dir = "out";
  SimulateSpec simulate;
  CltSpec clt;
  BlocksSpec blocks;
  SweepSpec moments;

  NoiseModel noise_model() const;
  /// Throws ScheduleInvalidError for a rejected power law.
  Schedule make_schedule() const;
  std::vector<StatSpec> stat_specs() const;
  EngineOptions engine() const;
  /// Checks every field that does not depend on the command. Throws ConfigError.
  void validate() const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<std::int64_t> replicates;
};

/// Unknown keys raise ConfigError naming the key.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// defaults < file < MDP_SEED < flags.
ExperimentConfig resolve_config(const std::optional<std::string>& path, const Overrides& flags);

nlohmann::json to_json(const ExperimentConfig& c);

/// Twelve hex digits hashing the command and the resolved configuration.
std::string run_id(const std::string& command, const ExperimentConfig& c);

}  // namespace mdp
