#include "mdp/noise.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mdp/error.hpp"
#include "mdp/fastmath.hpp"
#include "mdp/kernels.hpp"

namespace mdp {

NoiseModel NoiseModel::normal(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("noise: sigma must be positive");
  NoiseModel m;
  m.kind_ = NoiseKind::normal;
  m.param_ = sigma;
  m.s2_ = sigma * sigma;
  m.s4_ = 3.0 * m.s2_ * m.s2_;
  m.alpha_ = 0.25 / m.s2_;
  return m;
}

NoiseModel NoiseModel::rademacher() {
  NoiseModel m = discrete({-1.0, 1.0}, {{1, 2}, {1, 2}});
  m.kind_ = NoiseKind::rademacher;
  return m;
}

NoiseModel NoiseModel::uniform(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("noise: uniform half-width must be positive");
  NoiseModel m;
  m.kind_ = NoiseKind::uniform;
  m.param_ = a;
  m.s2_ = a * a / 3.0;
  m.s4_ = a * a * a * a / 5.0;
  m.alpha_ = 1.0;
  return m;
}

NoiseModel NoiseModel::three_point() { return discrete({-1.0, 0.0, 1.0}, {{1, 4}, {1, 2}, {1, 4}}); }

NoiseModel NoiseModel::discrete(std::vector<double> support, std::vector<Rational> probabilities) {
  if (support.empty() || support.size() != probabilities.size())
    throw ConfigError("noise: support and probabilities must be non-empty and of equal length");
  std::uint64_t denom = 1;
  for (const Rational& p : probabilities) {
    if (p.num <= 0 || p.den <= 0) throw ConfigError("noise: probabilities must be positive fractions");
    const auto d = static_cast<std::uint64_t>(p.den / std::gcd(p.num, p.den));
    denom = std::lcm(denom, d);
    if (denom > (1ull << 40)) throw ConfigError("noise: probability denominators too large");
  }
  NoiseModel m;
  m.kind_ = NoiseKind::discrete;
  m.denom_ = denom;
  std::uint64_t total = 0;
  for (Rational& p : probabilities) {
    const std::int64_t g = std::gcd(p.num, p.den);
    p = {p.num / g, p.den / g};
    total += static_cast<std::uint64_t>(p.num) * (denom / static_cast<std::uint64_t>(p.den));
    m.cum_.push_back(total);
  }
  if (total != denom) throw ConfigError("noise: probabilities must sum to exactly 1");
  long double mean = 0, s2 = 0, s4 = 0, scale = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!std::isfinite(support[i])) throw ConfigError("noise: support values must be finite");
    const long double p = static_cast<long double>(probabilities[i].num) / probabilities[i].den;
    const long double v = support[i];
    mean += p * v;
    s2 += p * v * v;
    s4 += p * v * v * v * v;
    scale = std::max(scale, std::fabs(v));
  }
  if (std::fabs(mean) > 1e-15L * scale) throw ConfigError("noise: discrete law must have mean zero");
  if (!(s2 > 0)) throw ConfigError("noise: discrete law is degenerate at zero");
  m.support_ = std::move(support);
  m.probs_ = std::move(probabilities);
  m.s2_ = static_cast<double>(s2);
  m.s4_ = static_cast<double>(s4);
  m.alpha_ = 1.0;
  return m;
}

std::string NoiseModel::name() const {
  std::ostringstream os;
  switch (kind_) {
    case NoiseKind::normal: os << "normal(sigma=" << param_ << ")"; break;
    case NoiseKind::rademacher: os << "rademacher"; break;
    case NoiseKind::uniform: os << "uniform(a=" << param_ << ")"; break;
    case NoiseKind::discrete:
      os << "discrete{";
      for (std::size_t i = 0; i < support_.size(); ++i)
        os << (i ? "," : "") << support_[i] << ":" << probs_[i].num << "/" << probs_[i].den;
      os << "}";
      break;
  }
  return os.str();
}

int NoiseModel::draws_per_block() const { return kind_ == NoiseKind::discrete ? 2 : 4; }

double NoiseModel::draw(const Philox4x32::Counter& w, int slot) const {
  switch (kind_) {
    case NoiseKind::normal: {
      double z0, z1;
      const int pair = slot / 2;
      fastmath::box_muller(uniform_open01(w[2 * pair]), uniform_open01(w[2 * pair + 1]), z0, z1);
      return param_ * (slot % 2 == 0 ? z0 : z1);
    }
    case NoiseKind::rademacher: return (w[slot] >> 31) != 0 ? 1.0 : -1.0;
    case NoiseKind::uniform: return param_ * (2.0 * uniform_open01(w[slot]) - 1.0);
    case NoiseKind::discrete: {
      const std::uint64_t bits = (std::uint64_t{w[2 * slot]} << 32) | w[2 * slot + 1];
      const auto r = static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * denom_) >> 64);
      std::size_t i = 0;
      while (cum_[i] <= r) ++i;
      return support_[i];
    }
  }
  return 0.0;
}

std::vector<double> sample(const NoiseModel& model, std::size_t count, const StreamId& stream) {
  std::vector<double> out(count);
  const int per = model.draws_per_block();
  const Philox4x32::Key key = stream.key();
  for (std::size_t t = 0; t < count;) {
    const std::uint64_t blk = t / static_cast<std::size_t>(per);
    const auto w = Philox4x32::apply(stream.counter(blk), key);
    if (model.kind() == NoiseKind::normal) {
      double z[4];
      fastmath::box_muller(uniform_open01(w[0]), uniform_open01(w[1]), z[0], z[1]);
      fastmath::box_muller(uniform_open01(w[2]), uniform_open01(w[3]), z[2], z[3]);
      for (int i = 0; i < 4 && t < count; ++i, ++t) out[t] = model.sigma() == 1.0 ? z[i] : model.sigma() * z[i];
    } else {
      for (int i = 0; i < per && t < count; ++i, ++t) out[t] = model.draw(w, i);
    }
  }
  return out;
}

void fill_lanes(const NoiseModel& model, const Philox4x32::Key& key, const std::uint64_t* streams,
                std::uint64_t first_block, std::size_t blocks, double* out) {
  using kernels::kLanes;
  if (model.kind() == NoiseKind::normal) {
    kernels::active_table().normal_fill(key, streams, first_block, blocks, out);
    if (model.sigma() != 1.0)
      for (std::size_t i = 0; i < 4 * blocks * kLanes; ++i) out[i] = model.sigma() * out[i];
    return;
  }
  const int per = model.draws_per_block();
  for (int lane = 0; lane < kLanes; ++lane) {
    const StreamId id{0, streams[lane]};
    for (std::size_t b = 0; b < blocks; ++b) {
      const auto w = Philox4x32::apply(id.counter(first_block + b), key);
      for (int i = 0; i < per; ++i)
        out[(per * b + static_cast<std::size_t>(i)) * kLanes + static_cast<std::size_t>(lane)] = model.draw(w, i);
    }
  }
}

Integrability verify_integrability(const NoiseModel& model, double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("integrability: alpha must be positive");
  const double inf = std::numeric_limits<double>::infinity();
  switch (model.kind()) {
    case NoiseKind::normal: {
      const double t = 2.0 * alpha * model.second_moment();
      if (t >= 1.0) return {false, inf};
      return {true, 1.0 / std::sqrt(1.0 - t)};
    }
    case NoiseKind::uniform: {
      // (1/a) int_0^a exp(alpha x^2) dx = sum_k (alpha a^2)^k / (k! (2k+1))
      const double z = alpha * model.half_width() * model.half_width();
      double term = 1.0, sum = 1.0;
      for (int k = 1; k < 100000; ++k) {
        term *= z / k;
        const double add = term / (2.0 * k + 1.0);
        sum += add;
        if (add < 1e-17 * sum || !std::isfinite(sum)) break;
      }
      return {true, sum};
    }
    case NoiseKind::rademacher:
    case NoiseKind::discrete: {
      long double sum = 0;
      for (std::size_t i = 0; i < model.support().size(); ++i) {
        const long double v = model.support()[i];
        sum += static_cast<long double>(model.probabilities()[i].num) / model.probabilities()[i].den *
               std::exp(static_cast<long double>(alpha) * v * v);
      }
      return {true, static_cast<double>(sum)};
    }
  }
  return {false, inf};
}

}  // namespace mdp
