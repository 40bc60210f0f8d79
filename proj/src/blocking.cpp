#include "mdp/blocking.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mdp/error.hpp"
#include "mdp/estimators.hpp"

namespace mdp {

namespace {

constexpr std::uint64_t kAbcdDomain = 0xB10C;
constexpr std::uint64_t kMaximalDomain = 0x3A81;

}  // namespace

double BlockDecomposition::reassembled() const {
  double s = 0.0;
  for (double z : z_blocks) s += z;
  return s + skipped_tail + separators + remainder;
}

BlockDecomposition decompose(std::span<const double> seq, int m, int p) {
  if (m < 1) throw ConfigError("block width m must be >= 1");
  if (p < 2) throw ConfigError("super-block factor p must be >= 2");
  const auto n = static_cast<std::int64_t>(seq.size());
  if (n < static_cast<std::int64_t>(m) * p) {
    std::ostringstream msg;
    msg << "sequence of length " << n << " is shorter than m*p = " << static_cast<std::int64_t>(m) * p;
    throw TooShortError(msg.str());
  }
  BlockDecomposition d;
  d.m = m;
  d.p = p;
  d.n = n;
  d.l_count = n / m;
  d.t_count = (d.l_count - 1) / p;
  d.y_blocks.assign(static_cast<std::size_t>(d.l_count), 0.0);
  for (std::int64_t j = 0; j < d.l_count; ++j)
    for (int i = 0; i < m; ++i) d.y_blocks[static_cast<std::size_t>(j)] += seq[static_cast<std::size_t>(j * m + i)];
  auto y = [&](std::int64_t j) { return d.y_blocks[static_cast<std::size_t>(j - 1)]; };
  for (std::int64_t h = 1; h <= d.t_count; ++h) {
    double z = 0.0;
    for (std::int64_t j = (h - 1) * p + 1; j < h * p; ++j) z += y(j);
    d.z_blocks.push_back(z);
    d.separators += y(h * p);
  }
  for (std::int64_t j = d.t_count * p + 1; j <= d.l_count; ++j) d.skipped_tail += y(j);
  for (std::int64_t i = d.l_count * m; i < n; ++i) d.remainder += seq[static_cast<std::size_t>(i)];
  for (double x : seq) d.total += x;
  return d;
}

int choose_p(std::int64_t n, int m, double b, double gamma_dep) {
  const double root_n = std::sqrt(static_cast<double>(n));
  const double a = b * std::pow(static_cast<double>(m), 1.0 + gamma_dep) / root_n;
  if (!(a < 1.0)) {
    std::ostringstream msg;
    msg << "no admissible p: b*m^(1+gamma)/sqrt(n) = " << a << " >= 1";
    throw InfeasibleError(msg.str());
  }
  const double inner = std::pow(root_n / b, 1.0 / (1.0 + gamma_dep)) / m;
  return std::max(2, static_cast<int>(std::floor(std::sqrt(inner))));
}

double TruncationSpec::threshold() const { return tau * std::sqrt(static_cast<double>(n)) / b; }

Truncated truncate(std::span<const double> seq, const TruncationSpec& spec) {
  const double cut = spec.threshold();
  Truncated out;
  out.values.reserve(seq.size());
  for (double x : seq) {
    if (std::abs(x) > cut) {
      out.values.push_back(0.0);
      ++out.zeroed;
    } else {
      out.values.push_back(x);
    }
  }
  return out;
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

// sqrt(1-theta^2) U_{1,l,m} from xi_{2-m} .. xi_{1+l}, stored from index 2-m.
double scaled_u(const std::vector<double>& xi, int m, int l, double theta, double s2) {
  auto at = [&](int k) { return xi[static_cast<std::size_t>(k - (2 - m))]; };
  double sum = at(1 + l) * at(1);
  double power = 1.0;
  for (int j = 1; j < m; ++j) {
    power *= theta;
    sum += power * (at(1 + l - j) * at(1) + at(1 + l) * at(1 - j));
  }
  sum -= std::pow(theta, l) * s2;
  return std::sqrt(1.0 - theta * theta) * sum;
}

double support_bound(const NoiseModel& model) {
  if (model.kind() == NoiseKind::uniform) return model.half_width();
  if (!model.has_finite_support()) return INFINITY;
  double b = 0.0;
  for (double v : model.support()) b = std::max(b, std::abs(v));
  return b;
}

CheckStatus classify(double low, double high, double threshold) {
  if (high <= threshold) return CheckStatus::pass;
  if (low > threshold) return CheckStatus::fail;
  return CheckStatus::inconclusive;
}

}  // namespace

std::vector<ConditionCheck> check_abcd(const SchedulePoint& point, double gamma_dep, const UWindow& window,
                                       const NoiseModel& model, const AbcdThresholds& th) {
  if (th.replicates < 1) throw ConfigError("check_abcd needs replicates >= 1");
  if (!(th.big_m > 0.0) || !(th.epsilon > 0.0)) throw ConfigError("check_abcd needs M > 0 and epsilon > 0");
  const int m = window.m, l = window.l;
  const double theta = window.theta, s2 = model.second_moment();
  const double n = static_cast<double>(point.n);
  const double root_n = std::sqrt(n);
  const double scale = root_n / point.b;
  std::vector<ConditionCheck> out;

  ConditionCheck a{"A", point.b * std::pow(static_cast<double>(m), 1.0 + gamma_dep) / root_n, 0, 0, 0.0, th.small, CheckStatus::pass, ""};
  a.ci_low = a.ci_high = a.value;
  a.status = a.value < th.small ? CheckStatus::pass : CheckStatus::fail;
  a.note = "b*m^(1+gamma)/sqrt(n)";
  out.push_back(a);

  // (B): n/(b^2 m) * int_M^inf e^x P(|X| >= c x) dx with c = sqrt(n)/(b m).
  // For the empirical law the integral is mean((e^{|X|/c} - e^M)_+).
  // (C): scale^{2+2/(1+g)} P(|X| > eps scale^{1-1/(1+g)}).
  const double c = root_n / (point.b * m);
  const double b_factor = n / (point.b * point.b * m);
  const double c_factor = std::pow(scale, 2.0 + 2.0 / (1.0 + gamma_dep));
  const double c_level = th.epsilon * std::pow(scale, 1.0 - 1.0 / (1.0 + gamma_dep));
  const double bmax = support_bound(model);
  double xmax = INFINITY;
  if (std::isfinite(bmax)) {
    double k_m = 0.0, power = 1.0;
    for (int j = 1; j < m; ++j) k_m += (power *= theta);
    xmax = std::sqrt(1.0 - theta * theta) * (bmax * bmax * (2.0 * k_m + 1.0) + std::pow(theta, l) * s2);
  }

  ConditionCheck b{"B", 0, 0, 0, 0.0, th.small, CheckStatus::pass, ""};
  ConditionCheck cc{"C", 0, 0, 0, 0.0, th.small, CheckStatus::pass, ""};
  b.note = "n/(b^2 m) int_M^inf e^x P(|X1| >= sqrt(n) x/(b m)) dx";
  cc.note = "(sqrt(n)/b)^(2+2/(1+gamma)) P(|X1| > eps (sqrt(n)/b)^(1-1/(1+gamma)))";
  const bool b_exact = xmax / c <= th.big_m;
  const bool c_exact = xmax <= c_level;
  if (b_exact) b.note += "; zero: noise bound makes the event empty";
  if (c_exact) cc.note += "; zero: noise bound makes the event empty";

  if (!b_exact || !c_exact) {
    const std::int64_t reps = th.replicates;
    std::vector<double> xs(static_cast<std::size_t>(reps));
    const int draws = m + l;
    stats::parallel_for(reps, th.workers, [&](std::int64_t r) {
      const StreamId sid{th.seed, derive_stream(kAbcdDomain, static_cast<std::uint64_t>(point.n), static_cast<std::uint64_t>(r))};
      const auto xi = sample(model, static_cast<std::size_t>(draws), sid);
      xs[static_cast<std::size_t>(r)] = scaled_u(xi, m, l, theta, s2);
    });
    if (!b_exact) {
      // Plain MC on an unbounded integrand: report the mean with a normal-theory band.
      const double em = std::exp(th.big_m);
      double s = 0.0, s_sq = 0.0;
      for (double x : xs) {
        const double v = std::max(0.0, std::exp(std::abs(x) / c) - em);
        s += v;
        s_sq += v * v;
      }
      const double mean = s / static_cast<double>(reps);
      const double var = std::max(0.0, s_sq / static_cast<double>(reps) - mean * mean);
      const double se = std::sqrt(var / static_cast<double>(reps));
      b.value = b_factor * mean;
      b.ci_low = b_factor * std::max(0.0, mean - stats::kZ95 * se);
      b.ci_high = b_factor * (mean + stats::kZ95 * se);
      std::int64_t tail = 0;
      for (double x : xs) tail += std::abs(x) / c > th.big_m;
      if (tail == 0) {
        b.ci_high = INFINITY;
        b.note += "; no sample reached M, tail unresolved";
      }
      b.status = classify(b.ci_low, b.ci_high, th.small);
    }
    if (!c_exact) {
      std::int64_t hits = 0;
      for (double x : xs) hits += std::abs(x) > c_level;
      const auto ci = stats::wilson(hits, reps);
      cc.value = c_factor * static_cast<double>(hits) / static_cast<double>(reps);
      cc.ci_low = c_factor * ci.low;
      cc.ci_high = c_factor * ci.high;
      cc.status = classify(cc.ci_low, cc.ci_high, th.small);
    }
  }
  out.push_back(b);
  out.push_back(cc);

  const double one_minus = 1.0 - theta * theta;
  const double sigma2 = 4.0 * s2 * s2;
  ConditionCheck d1{"D.variance", one_minus / m * block_variance_exact(l, window), 0, 0, sigma2, th.d_relative, CheckStatus::pass, ""};
  d1.ci_low = d1.ci_high = d1.value;
  d1.status = std::abs(d1.value / sigma2 - 1.0) <= th.d_relative ? CheckStatus::pass : CheckStatus::fail;
  d1.note = "(1-theta^2)/m Var(U_1+...+U_m) -> 4 (E xi^2)^2";
  ConditionCheck d2{"D.weighted", one_minus / m * weighted_time_sum(l, window), 0, 0, 0.0, th.d_relative * sigma2, CheckStatus::pass, ""};
  d2.ci_low = d2.ci_high = d2.value;
  d2.status = std::abs(d2.value) <= d2.threshold ? CheckStatus::pass : CheckStatus::fail;
  d2.note = "(1-theta^2)/m sum_k k E(U_1 U_{k+1}) -> 0";
  out.push_back(d1);
  out.push_back(d2);
  return out;
}

double maximal_bound(double t, std::int64_t n, double alpha0, double beta0) {
  if (!(alpha0 > 0.0) || !(beta0 > 0.0)) throw ConfigError("maximal bound constants must be positive");
  if (!(t >= 0.0)) throw ConfigError("maximal bound needs t >= 0");
  return 36.0 * std::exp(-t * t / (alpha0 * static_cast<double>(n) + beta0 * t));
}

MaximalCheck maximal_check(const NoiseModel& model, std::int64_t n, int p, double t, double alpha0, double beta0,
                           std::int64_t replicates, std::uint64_t seed, int workers) {
  if (p < 1) throw ConfigError("maximal check needs p >= 1");
  if (n < 1 || replicates < 1) throw ConfigError("maximal check needs n, replicates >= 1");
  MaximalCheck out;
  out.bound = maximal_bound(t, n, alpha0, beta0);
  out.replicates = replicates;
  std::vector<char> hit(static_cast<std::size_t>(replicates), 0);
  stats::parallel_for(replicates, workers, [&](std::int64_t r) {
    const StreamId sid{seed, derive_stream(kMaximalDomain, static_cast<std::uint64_t>(n) * 131 + p, static_cast<std::uint64_t>(r))};
    const auto xi = sample(model, static_cast<std::size_t>(n + p), sid);  // xi[i] = xi_{i+1-p}
    double s = 0.0;
    for (std::int64_t k = 1; k <= n; ++k) {
      s += xi[static_cast<std::size_t>(k + p - 1)] * xi[static_cast<std::size_t>(k - 1)];
      if (std::abs(s) >= t) {
        hit[static_cast<std::size_t>(r)] = 1;
        break;
      }
    }
  });
  for (char h : hit) out.hits += h;
  out.p_hat = static_cast<double>(out.hits) / static_cast<double>(replicates);
  out.ci = stats::wilson(out.hits, replicates);
  out.constants_valid = out.p_hat <= out.bound;
  return out;
}

double exponential_approx_gap(const SamplePath& path, const UWindow& window, double b) {
  const std::int64_t n = path.n();
  const int l = window.l;
  if (!path.has_noise(2 - window.m) || !path.has_noise(n))
    throw RangeError("exponential approximation gap needs noise from index 2-m through n");
  const double s2 = window.s2;
  double sum = 0.0;
  for (std::int64_t k = 1; k <= n - l; ++k) sum += u_value(path, k, window) - u_exact(path, k, l, s2);
  return std::sqrt(1.0 - window.theta * window.theta) / (b * std::sqrt(static_cast<double>(n - l))) * std::abs(sum);
}

}  // namespace mdp
