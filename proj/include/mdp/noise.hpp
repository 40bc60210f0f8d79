#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdp/rng.hpp"

namespace mdp {

enum class NoiseKind { normal, rademacher, uniform, discrete };

/// Exact probability num/den.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Centered i.i.d. driving-noise law. Immutable once built.
class NoiseModel {
 public:
  static NoiseModel normal(double sigma = 1.0);
  static NoiseModel rademacher();
  /// Uniform on [-a, a].
  static NoiseModel uniform(double a);
  /// Finite support with exact probabilities; the mean must vanish.
  static NoiseModel discrete(std::vector<double> support, std::vector<Rational> probabilities);
  /// Support {-1, 0, 1} with probabilities (1/4, 1/2, 1/4).
  static NoiseModel three_point();

  NoiseKind kind() const { return kind_; }
  std::string name() const;
  double second_moment() const { return s2_; }
  double fourth_moment() const { return s4_; }
  /// Some alpha with E exp(alpha xi^2) finite.
  double integrability_alpha() const { return alpha_; }

  double sigma() const { return param_; }
  double half_width() const { return param_; }

  /// Support and probabilities; for rademacher this is {-1, 1} with 1/2 each.
  const std::vector<double>& support() const { return support_; }
  const std::vector<Rational>& probabilities() const { return probs_; }
  bool has_finite_support() const { return !support_.empty(); }

  /// Draws produced by one Philox block (4 for 32-bit laws, 2 for discrete).
  int draws_per_block() const;
  /// Draw `slot` of a 4x32-bit block.
  double draw(const Philox4x32::Counter& block, int slot) const;

 private:
  NoiseModel() = default;
  void finish();

  NoiseKind kind_ = NoiseKind::normal;
  double param_ = 1.0;
  double s2_ = 1.0;
  double s4_ = 3.0;
  double alpha_ = 0.25;
  std::vector<double> support_;
  std::vector<Rational> probs_;
  std::vector<std::uint64_t> cum_;  // cumulative counts over common denominator
  std::uint64_t denom_ = 1;
};

/// `count` draws of `stream`; draw t comes from Philox block t / draws_per_block.
std::vector<double> sample(const NoiseModel& model, std::size_t count, const StreamId& stream);

/// Interleaved draws for kernels::kLanes streams sharing a key:
/// out[i * kLanes + lane] = draw (draws_per_block * first_block + i) of streams[lane].
void fill_lanes(const NoiseModel& model, const Philox4x32::Key& key, const std::uint64_t* streams,
                std::uint64_t first_block, std::size_t blocks, double* out);

struct Integrability {
  bool finite = false;
  double value = 0.0;  ///< E exp(alpha xi^2), +inf when not finite
};

/// E exp(alpha xi^2). Throws ConfigError for alpha <= 0.
Integrability verify_integrability(const NoiseModel& model, double alpha);

}  // namespace mdp
