#include "mdp/ar1.hpp"

#include <cmath>
#include <ostream>

#include "mdp/csv.hpp"
#include "mdp/error.hpp"

namespace mdp {

namespace {

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta < 1.0)) throw RangeError("theta must lie in [0, 1)");
}

}  // namespace

SamplePath SamplePath::from_states(double theta, std::vector<double> states) {
  if (states.empty()) throw RangeError("path needs at least X_0");
  SamplePath p;
  p.theta_ = theta;
  p.states_ = std::move(states);
  return p;
}

SamplePath SamplePath::from_parts(double theta, std::vector<double> states, std::vector<double> noise,
                                  std::int64_t noise_begin, InitPolicy policy, std::int64_t horizon) {
  SamplePath p = from_states(theta, std::move(states));
  p.noise_ = std::move(noise);
  p.noise_begin_ = noise_begin;
  p.policy_ = policy;
  p.horizon_ = horizon;
  return p;
}

double SamplePath::x(std::int64_t k) const {
  if (k < 0 || k > n()) throw RangeError("state index out of range");
  return states_[static_cast<std::size_t>(k)];
}

double SamplePath::xi(std::int64_t k) const {
  if (!has_noise(k)) throw RangeError("noise index " + std::to_string(k) + " not retained");
  return noise_[static_cast<std::size_t>(k - noise_begin_)];
}

std::int64_t truncation_horizon(double theta, double eps) {
  check_theta(theta);
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps_init must lie in (0, 1)");
  if (theta == 0.0) return 0;
  auto h = static_cast<std::int64_t>(std::ceil(std::log(eps) / std::log(theta)));
  while (h > 0 && std::pow(theta, static_cast<double>(h - 1)) <= eps) --h;
  while (std::pow(theta, static_cast<double>(h)) > eps) ++h;
  return h;
}

double stationary_variance(double theta, double second_moment) {
  check_theta(theta);
  return second_moment / (1.0 - theta * theta);
}

SamplePath simulate(double theta, std::int64_t n, const NoiseModel& model, const StreamId& stream,
                    const InitSpec& init) {
  check_theta(theta);
  if (n < 1) throw RangeError("path length must be positive");
  if (init.history < 0) throw ConfigError("noise history must be non-negative");
  std::vector<double> states(static_cast<std::size_t>(n) + 1);

  if (init.policy == InitPolicy::truncated_series) {
    const std::int64_t horizon = truncation_horizon(theta, init.eps);
    const std::int64_t start = std::max(horizon, init.history);
    std::vector<double> noise = sample(model, static_cast<std::size_t>(start + n + 1), stream);
    double x = 0.0;
    for (std::int64_t j = -start; j <= n; ++j) {
      x = theta * x + noise[static_cast<std::size_t>(j + start)];
      if (j >= 0) states[static_cast<std::size_t>(j)] = x;
    }
    return SamplePath::from_parts(theta, std::move(states), std::move(noise), -start,
                                  InitPolicy::truncated_series, horizon);
  }

  if (model.kind() != NoiseKind::normal)
    throw ConfigError("exact-gaussian initialisation requires normal noise");
  const std::int64_t h = init.history;
  // draw 0 seeds X_{-h}; draws 1.. are xi_{-h+1}, ..., xi_n
  std::vector<double> draws = sample(model, static_cast<std::size_t>(h + n + 1), stream);
  double x = draws[0] / std::sqrt(1.0 - theta * theta);
  if (h == 0) states[0] = x;
  for (std::int64_t j = -h + 1; j <= n; ++j) {
    x = theta * x + draws[static_cast<std::size_t>(j + h)];
    if (j >= 0) states[static_cast<std::size_t>(j)] = x;
  }
  std::vector<double> noise(draws.begin() + 1, draws.end());
  return SamplePath::from_parts(theta, std::move(states), std::move(noise), -h + 1,
                                InitPolicy::exact_gaussian, h);
}

double truncated_state(const SamplePath& path, std::int64_t k, int m) {
  if (m < 2) throw RangeError("truncation width m must be at least 2");
  if (!path.has_noise(k - m + 1) || !path.has_noise(k - 1))
    throw RangeError("insufficient noise history for truncated state");
  double acc = 0.0, w = 1.0;
  for (int j = 0; j <= m - 2; ++j) {
    acc += w * path.xi(k - 1 - j);
    w *= path.theta();
  }
  return acc;
}

double pair_product(const SamplePath& path, std::int64_t k, std::int64_t p) {
  if (p < 0) throw RangeError("lag must be non-negative");
  return path.xi(k) * path.xi(k - p);
}

void write_path_csv(std::ostream& os, const SamplePath& path) {
  csv::row(os, {"k", "X_k", "xi_k"});
  for (std::int64_t k = 0; k <= path.n(); ++k) {
    const std::string xi = path.has_noise(k) ? csv::num(path.xi(k)) : std::string();
    csv::row(os, {csv::num(k), csv::num(path.x(k)), xi});
  }
}

}  // namespace mdp
