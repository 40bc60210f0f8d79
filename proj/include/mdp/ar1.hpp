#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mdp/noise.hpp"
#include "mdp/rng.hpp"

namespace mdp {

enum class InitPolicy { exact_gaussian, truncated_series };

struct InitSpec {
  InitPolicy policy = InitPolicy::truncated_series;
  double eps = 1e-12;        ///< truncated-series tolerance on theta^H
  std::int64_t history = 0;  ///< noise values to retain before index 0
};

/// One simulated trajectory X_0..X_n of X_k = theta X_{k-1} + xi_k together
/// with the noise that generated it.
class SamplePath {
 public:
  /// Path with injected states and no noise record (test fixtures).
  static SamplePath from_states(double theta, std::vector<double> states);
  /// Path with injected states and noise xi_{noise_begin} .. xi_{noise_begin + size - 1}.
  static SamplePath from_parts(double theta, std::vector<double> states, std::vector<double> noise,
                               std::int64_t noise_begin, InitPolicy policy, std::int64_t horizon);

  double theta() const { return theta_; }
  std::int64_t n() const { return static_cast<std::int64_t>(states_.size()) - 1; }
  const std::vector<double>& states() const { return states_; }
  const std::vector<double>& noise() const { return noise_; }
  InitPolicy init_policy() const { return policy_; }
  /// Burn-in length H for truncated-series starts, retained history otherwise.
  std::int64_t horizon() const { return horizon_; }

  /// Smallest index k with xi_k retained.
  std::int64_t noise_begin() const { return noise_begin_; }
  bool has_noise(std::int64_t k) const {
    return k >= noise_begin_ && k < noise_begin_ + static_cast<std::int64_t>(noise_.size());
  }

  double x(std::int64_t k) const;
  double xi(std::int64_t k) const;

 private:
  SamplePath() = default;
  double theta_ = 0.0;
  std::vector<double> states_;
  std::vector<double> noise_;
  std::int64_t noise_begin_ = 1;
  InitPolicy policy_ = InitPolicy::truncated_series;
  std::int64_t horizon_ = 0;
};

/// Smallest H with theta^H <= eps; 0 when theta == 0.
std::int64_t truncation_horizon(double theta, double eps);

double stationary_variance(double theta, double second_moment);

/// Stationary-start path. Truncated-series starts from zero at index
/// -max(H, history); exact-gaussian draws X_{-history} from the stationary
/// normal law and requires normal noise.
SamplePath simulate(double theta, std::int64_t n, const NoiseModel& model, const StreamId& stream,
                    const InitSpec& init = {});

/// X_{k-1,m} = sum_{j=0}^{m-2} theta^j xi_{k-1-j}.
double truncated_state(const SamplePath& path, std::int64_t k, int m);

/// W_{k,p} = xi_k xi_{k-p}.
double pair_product(const SamplePath& path, std::int64_t k, std::int64_t p);

/// Columns k, X_k, xi_k for k = 0..n; xi_k is empty when not retained.
void write_path_csv(std::ostream& os, const SamplePath& path);

}  // namespace mdp
