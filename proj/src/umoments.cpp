#include "mdp/umoments.hpp"

#include <algorithm>
#include <cmath>

#include "mdp/error.hpp"
#include "mdp/stats.hpp"

namespace mdp {

namespace {

double ipow(double x, int k) { return std::pow(x, static_cast<double>(k)); }

double ind(bool b) { return b ? 1.0 : 0.0; }

const std::vector<double>& require_coefficients(const UWindow& w) {
  if (w.coefficients.empty()) throw ConfigError("window has no coefficients");
  return w.coefficients;
}

void check_lag(int l, const UWindow& w) {
  if (l < 0 || l > w.m_max) throw RangeError("lag outside [0, M_max]");
}

}  // namespace

UWindow UWindow::make(int m_max, int m, double theta, double s2, double s4, int l, int q,
                      std::vector<double> coefficients) {
  if (m_max < 0) throw ConfigError("M_max must be non-negative");
  if (m <= 2 * m_max) throw ConfigError("window needs m > 2 M_max");
  if (!(theta >= 0.0 && theta < 1.0)) throw ConfigError("theta must lie in [0, 1)");
  if (l < 0 || l > m_max || q < 0 || q > m_max) throw ConfigError("lags must lie in [0, M_max]");
  if (!coefficients.empty() && coefficients.size() != static_cast<std::size_t>(m_max) + 1)
    throw ConfigError("coefficients need M_max + 1 entries");
  if (!(s2 > 0.0) || !(s4 >= s2 * s2 * (1.0 - 1e-12))) throw ConfigError("invalid noise moments");
  UWindow w;
  w.l = l;
  w.q = q;
  w.m = m;
  w.m_max = m_max;
  w.theta = theta;
  w.s2 = s2;
  w.s4 = s4;
  w.coefficients = std::move(coefficients);
  return w;
}

UWindow UWindow::make(int m_max, int m, double theta, const NoiseModel& model, int l, int q,
                      std::vector<double> coefficients) {
  return make(m_max, m, theta, model.second_moment(), model.fourth_moment(), l, q, std::move(coefficients));
}

double even_power_sum(double theta, std::int64_t lo, std::int64_t hi) {
  if (hi < lo) return 0.0;
  const std::int64_t count = hi - lo + 1;
  const double t2 = theta * theta;
  if (count <= 64) {
    double acc = 0.0;
    double p = std::pow(t2, static_cast<double>(lo));
    for (std::int64_t j = 0; j < count; ++j) {
      acc += p;
      p *= t2;
    }
    return acc;
  }
  const double one_minus = (1.0 - theta) * (1.0 + theta);
  return std::pow(t2, static_cast<double>(lo)) * -std::expm1(static_cast<double>(count) * std::log(t2)) /
         one_minus;
}

double u_value(const SamplePath& path, std::int64_t k, const UWindow& w) {
  const int l = w.l;
  if (!path.has_noise(k - w.m + 1) || !path.has_noise(k + l))
    throw RangeError("insufficient noise history for U");
  const double t = w.theta;
  double a = 0.0, b = 0.0, p = 1.0;
  for (int j = 1; j <= w.m - 1; ++j) {
    p *= t;
    a += p * path.xi(k + l - j);
    b += p * path.xi(k - j);
  }
  return a * path.xi(k) + path.xi(k + l) * b + path.xi(k + l) * path.xi(k) - ipow(t, l) * w.s2;
}

double u_second_moment(const UWindow& w) { return u_second_moment(w.l, w); }

double u_second_moment(int l, const UWindow& w) {
  check_lag(l, w);
  const double t = w.theta, s22 = w.s2 * w.s2;
  const double g = even_power_sum(t, 1, w.m - 1);
  if (l != 0) {
    const double t2l = ipow(t, 2 * l);
    return t2l * w.s4 + (1.0 - 2.0 * t2l + 2.0 * g) * s22;
  }
  return w.s4 + s22 * (4.0 * g - 1.0);
}

double u_cross_same_lag(int gap, const UWindow& w) {
  if (gap < 1) throw RangeError("same-lag cross moment needs gap >= 1");
  const int l = w.l;
  if (l == 0) return 0.0;
  const double c = ipow(w.theta, 2 * l) * w.s2 * w.s2;
  if (gap < l) return c;
  if (gap == l) return c * even_power_sum(w.theta, 0, w.m - 1 - 2 * l);
  return 0.0;
}

double u_cross_mixed(int gap, int l, int q, const UWindow& w) {
  if (gap < 0) throw RangeError("gap must be non-negative");
  check_lag(l, w);
  check_lag(q, w);
  const double t = w.theta, s22 = w.s2 * w.s2;
  if (gap == 0) {
    if (l == 0 && q == 0) return u_second_moment(0, w);
    if (l == q) {
      const double t2l = ipow(t, 2 * l);
      return t2l * w.s4 - 2.0 * t2l * s22 + s22 * (2.0 * even_power_sum(t, 1, w.m - 1) + 1.0);
    }
    if (l == 0 || q == 0) {
      const int p = std::max(l, q);
      const double tp = ipow(t, p);
      return tp * w.s4 - tp * s22 + 2.0 * s22 * tp * even_power_sum(t, 1, w.m - 1 - p);
    }
    const int d = std::abs(l - q);
    const double tlq = ipow(t, l + q);
    return tlq * w.s4 - 2.0 * tlq * s22 + ipow(t, d) * s22 * even_power_sum(t, 0, w.m - 1 - d);
  }
  const double a1 = ind(l > gap), a2 = ind(l == gap);
  if (l == 0) return 0.0;  // covers l = q = 0 as well
  if (q == 0) return 2.0 * ipow(t, l) * s22 * (a1 + a2 * even_power_sum(t, 0, w.m - 1 - l));
  if (l == q) {
    UWindow same = w;
    same.l = l;
    return u_cross_same_lag(gap, same);
  }
  const double sum_term = ipow(t, l + q) * s22 * (a1 + a2 * even_power_sum(t, 0, w.m - 1 - (l + q)));
  if (l < q) return sum_term;
  const double e1 = ind(l > gap + q), e2 = ind(l == gap + q);
  return sum_term + ipow(t, l - q) * s22 * (e1 + e2 * even_power_sum(t, 0, w.m - 1 - (l - q)));
}

double block_variance_exact(int l, const UWindow& w) {
  check_lag(l, w);
  const double m = w.m;
  const double second = m * u_second_moment(l, w);
  if (l == 0) return second;
  const double ll = l;
  const double pairs = (ll - 1.0) * m - ll * (ll - 1.0) / 2.0 + (m - ll) * even_power_sum(w.theta, 0, w.m - 1 - 2 * l);
  return second + 2.0 * ipow(w.theta, 2 * l) * w.s2 * w.s2 * pairs;
}

double block_variance_displayed(int l, const UWindow& w) {
  check_lag(l, w);
  const double m = w.m, ll = l, t = w.theta, s22 = w.s2 * w.s2;
  if (l == 0) return m * u_second_moment(0, w);
  const double t2l = ipow(t, 2 * l);
  return m * t2l * w.s4 + (m + (2.0 * (m - ll) * ll - 2.0 * m) * t2l) * s22 +
         (2.0 * m * even_power_sum(t, 1, w.m - 1) + 2.0 * (m - ll) * t2l * even_power_sum(t, 1, w.m - 1 - 2 * l)) * s22;
}

double weighted_time_sum(int l, const UWindow& w) {
  check_lag(l, w);
  UWindow same = w;
  same.l = l;
  double acc = 0.0;
  for (int k = 1; k <= std::min(l, w.m); ++k) acc += k * u_cross_same_lag(k, same);
  return acc;
}

double HatMoments::at(int gap) const {
  if (gap == 0) return second_moment;
  if (gap < 0) return at(-gap);
  return static_cast<std::size_t>(gap) <= cross.size() ? cross[static_cast<std::size_t>(gap) - 1] : 0.0;
}

HatMoments hat_y_moments(const UWindow& w) {
  const auto& a = require_coefficients(w);
  const int big_m = w.m_max;
  const double t = w.theta, s2 = w.s2, s4 = w.s4, s22 = s2 * s2;
  HatMoments h;

  // E Yhat^2: five-term expansion
  const double g1 = even_power_sum(t, 1, w.m - 1);
  double e2 = a[0] * a[0] * (s4 + s22 * (4.0 * g1 - 1.0));
  for (int l = 1; l <= big_m; ++l) {
    const double tl = ipow(t, l);
    e2 += 2.0 * a[0] * a[l] * (tl * s4 - tl * s22 + 2.0 * s22 * tl * even_power_sum(t, 1, w.m - 1 - l));
  }
  for (int l = 1; l <= big_m - 1; ++l)
    for (int q = l + 1; q <= big_m; ++q)
      e2 += a[l] * a[q] *
            (ipow(t, l + q) * s4 - 2.0 * ipow(t, l + q) * s22 + ipow(t, q - l) * s22 * even_power_sum(t, 0, w.m - 1 - (q - l)));
  for (int q = 1; q <= big_m - 1; ++q)
    for (int l = q + 1; l <= big_m; ++l)
      e2 += a[l] * a[q] *
            (ipow(t, l + q) * s4 - 2.0 * ipow(t, l + q) * s22 + ipow(t, l - q) * s22 * even_power_sum(t, 0, w.m - 1 - (l - q)));
  for (int l = 1; l <= big_m; ++l) {
    const double t2l = ipow(t, 2 * l);
    e2 += a[l] * a[l] * (t2l * s4 - 2.0 * t2l * s22 + s22 * (2.0 * g1 + 1.0));
  }
  h.second_moment = e2;

  // E(Yhat_i Yhat_k), k - i = gap: I_1 + ... + I_5
  for (int gap = 1; gap <= w.m + big_m; ++gap) {
    auto a1 = [&](int l) { return ind(l > gap); };
    auto a2 = [&](int l) { return ind(l == gap); };
    double i1 = 0.0, i2 = 0.0, i3 = 0.0, i4 = 0.0, i5 = 0.0;
    for (int l = 1; l <= big_m; ++l)
      i1 += a[l] * ipow(t, l) * (a1(l) + a2(l) * even_power_sum(t, 0, w.m - 1 - l));
    i1 *= 2.0 * s22 * a[0];
    for (int l = 1; l <= big_m; ++l)
      i2 += a[l] * a[l] * ipow(t, 2 * l) * (a1(l) + a2(l) * even_power_sum(t, 0, w.m - 1 - 2 * l));
    i2 *= s22;
    for (int l = 1; l <= big_m - 1; ++l)
      for (int q = l + 1; q <= big_m; ++q)
        i3 += a[l] * a[q] * ipow(t, l + q) * (a1(l) + a2(l) * even_power_sum(t, 0, w.m - 1 - (l + q)));
    i3 *= s22;
    for (int q = 1; q <= big_m - 1; ++q)
      for (int l = q + 1; l <= big_m; ++l) {
        i4 += a[l] * a[q] * ipow(t, l + q) * (a1(l) + a2(l) * even_power_sum(t, 0, w.m - 1 - (l + q)));
        i5 += a[l] * a[q] * ipow(t, l - q) *
              (ind(l > gap + q) + ind(l == gap + q) * even_power_sum(t, 0, w.m - 1 - (l - q)));
      }
    i4 *= s22;
    i5 *= s22;
    h.cross.push_back(i1 + i2 + i3 + i4 + i5);
  }
  return h;
}

double hat_y_bilinear(int gap, const UWindow& w) {
  const auto& a = require_coefficients(w);
  double acc = 0.0;
  for (int l = 0; l <= w.m_max; ++l)
    for (int q = 0; q <= w.m_max; ++q) acc += a[l] * a[q] * u_cross_mixed(gap, l, q, w);
  return acc;
}

double hat_block_variance(const UWindow& w) {
  const HatMoments h = hat_y_moments(w);
  double acc = w.m * h.second_moment;
  for (int g = 1; g <= w.m - 1; ++g) acc += 2.0 * (w.m - g) * h.at(g);
  return acc;
}

std::vector<double> estimator_weights(double theta, double s2) {
  const double d = (1.0 - theta * theta) * s2;
  return {-theta / d, 1.0 / d};
}

double hat_x_second_moment(double theta, int m) { return 1.0 - ipow(theta, 2 * m); }

const char* to_string(MomentKind kind) {
  switch (kind) {
    case MomentKind::mean: return "mean";
    case MomentKind::variance: return "variance";
    case MomentKind::same_lag_cross: return "same-lag-cross";
    case MomentKind::mixed_cross: return "mixed-cross";
    case MomentKind::hat_variance: return "hat-variance";
    case MomentKind::hat_cross: return "hat-cross";
    case MomentKind::block_variance: return "block-variance";
    case MomentKind::hat_block_variance: return "hat-block-variance";
  }
  return "?";
}

double closed_form(const MomentQuery& qy) {
  const UWindow& w = qy.window;
  switch (qy.kind) {
    case MomentKind::mean: return 0.0;
    case MomentKind::variance: return u_second_moment(w);
    case MomentKind::same_lag_cross: return u_cross_same_lag(qy.gap, w);
    case MomentKind::mixed_cross: return u_cross_mixed(qy.gap, w.l, w.q, w);
    case MomentKind::hat_variance: return hat_y_moments(w).second_moment;
    case MomentKind::hat_cross: return hat_y_moments(w).at(qy.gap);
    case MomentKind::block_variance: return block_variance_exact(w.l, w);
    case MomentKind::hat_block_variance: return hat_block_variance(w);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Enumeration oracle

namespace {

struct UTerm {
  std::int64_t k;
  int lag;
  double coeff;
};
using UForm = std::vector<UTerm>;

class Enumerator {
 public:
  Enumerator(const UWindow& w, const NoiseModel& model) : w_(w) {
    if (!model.has_finite_support()) throw ConfigError("enumeration oracle needs a finite-support noise law");
    values_ = model.support();
    for (const Rational& p : model.probabilities()) probs_.push_back(static_cast<long double>(p.num) / p.den);
    powers_.resize(static_cast<std::size_t>(w.m) + 1);
    powers_[0] = 1.0;
    for (int j = 1; j <= w.m; ++j) powers_[static_cast<std::size_t>(j)] = powers_[static_cast<std::size_t>(j) - 1] * w.theta;
  }

  /// E[F G]; G may be empty (then E[F]).
  long double expect(const UForm& f, const UForm& g, int workers) const {
    std::int64_t lo = 0, hi = 0;
    bool first = true;
    auto grow = [&](const UForm& form) {
      for (const UTerm& t : form) {
        const std::int64_t a = t.k - w_.m + 1, b = t.k + t.lag;
        lo = first ? a : std::min(lo, a);
        hi = first ? b : std::max(hi, b);
        first = false;
      }
    };
    grow(f);
    grow(g);
    const auto span = static_cast<std::size_t>(hi - lo + 1);
    std::vector<char> in_f(span, 0), in_g(span, 0);
    auto mark = [&](const UForm& form, std::vector<char>& flags) {
      for (const UTerm& t : form)
        for (std::int64_t i = t.k - w_.m + 1; i <= t.k + t.lag; ++i) flags[static_cast<std::size_t>(i - lo)] = 1;
    };
    mark(f, in_f);
    mark(g, in_g);
    std::vector<std::size_t> shared, only_f, only_g;
    for (std::size_t i = 0; i < span; ++i) {
      if (in_f[i] && in_g[i]) shared.push_back(i);
      else if (in_f[i]) only_f.push_back(i);
      else if (in_g[i]) only_g.push_back(i);
    }
    if (g.empty()) {
      shared.swap(only_f);  // single factor: enumerate everything at the outer level
    }
    const double s = static_cast<double>(values_.size());
    const double outer = std::pow(s, static_cast<double>(shared.size()));
    const double inner = std::pow(s, static_cast<double>(only_f.size())) + (g.empty() ? 0.0 : std::pow(s, static_cast<double>(only_g.size())));
    const double work = outer * std::max(1.0, inner);
    if (work > static_cast<double>(kEnumerationGuard))
      throw EnumerationGuardError("enumeration needs " + std::to_string(static_cast<long long>(work)) +
                                  " assignments, above the guard");

    const auto outer_count = static_cast<std::uint64_t>(outer);
    // slices are fixed so the rounding does not depend on the worker count
    const int nw = static_cast<int>(std::min<std::uint64_t>(outer_count, 64));
    std::vector<long double> partial(static_cast<std::size_t>(nw), 0.0L);
    auto run = [&](std::int64_t slice) {
      const int part = static_cast<int>(slice);
      const std::uint64_t begin = outer_count * static_cast<std::uint64_t>(part) / static_cast<std::uint64_t>(nw);
      const std::uint64_t end = outer_count * static_cast<std::uint64_t>(part + 1) / static_cast<std::uint64_t>(nw);
      std::vector<double> val(span, 0.0);
      long double acc = 0.0L;
      for (std::uint64_t code = begin; code < end; ++code) {
        long double p = 1.0L;
        std::uint64_t c = code;
        for (std::size_t v : shared) {
          const std::size_t digit = c % values_.size();
          c /= values_.size();
          val[v] = values_[digit];
          p *= probs_[digit];
        }
        const long double ef = conditional(f, only_f, val, lo);
        const long double eg = g.empty() ? 1.0L : conditional(g, only_g, val, lo);
        acc += p * ef * eg;
      }
      partial[static_cast<std::size_t>(part)] = acc;
    };
    stats::parallel_for(nw, std::max(1, workers), run);
    long double total = 0.0L;
    for (long double v : partial) total += v;
    return total;
  }

 private:
  long double conditional(const UForm& form, const std::vector<std::size_t>& priv, std::vector<double>& val,
                          std::int64_t lo) const {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < priv.size(); ++i) count *= values_.size();
    long double acc = 0.0L;
    for (std::uint64_t code = 0; code < count; ++code) {
      long double p = 1.0L;
      std::uint64_t c = code;
      for (std::size_t v : priv) {
        const std::size_t digit = c % values_.size();
        c /= values_.size();
        val[v] = values_[digit];
        p *= probs_[digit];
      }
      acc += p * evaluate(form, val, lo);
    }
    return acc;
  }

  long double evaluate(const UForm& form, const std::vector<double>& val, std::int64_t lo) const {
    long double acc = 0.0L;
    for (const UTerm& t : form) {
      auto xi = [&](std::int64_t i) { return static_cast<long double>(val[static_cast<std::size_t>(i - lo)]); };
      long double u = xi(t.k + t.lag) * xi(t.k) - static_cast<long double>(powers_[static_cast<std::size_t>(t.lag)]) * w_.s2;
      for (int j = 1; j <= w_.m - 1; ++j) {
        const long double pj = powers_[static_cast<std::size_t>(j)];
        u += pj * xi(t.k + t.lag - j) * xi(t.k) + pj * xi(t.k + t.lag) * xi(t.k - j);
      }
      acc += t.coeff * u;
    }
    return acc;
  }

  UWindow w_;
  std::vector<double> values_;
  std::vector<long double> probs_;
  std::vector<double> powers_;
};

UForm single(std::int64_t k, int lag) { return {{k, lag, 1.0}}; }

UForm hat(std::int64_t k, const UWindow& w) {
  const auto& a = require_coefficients(w);
  UForm f;
  for (int l = 0; l <= w.m_max; ++l)
    if (a[static_cast<std::size_t>(l)] != 0.0) f.push_back({k, l, a[static_cast<std::size_t>(l)]});
  return f;
}

}  // namespace

double brute_force_moment(const MomentQuery& qy, const NoiseModel& model, int workers) {
  const UWindow& w = qy.window;
  if (qy.gap < 0) throw RangeError("gap must be non-negative");
  // The noise moments in the window must be those of the law being enumerated.
  UWindow wm = w;
  wm.s2 = model.second_moment();
  wm.s4 = model.fourth_moment();
  const Enumerator e(wm, model);
  const std::int64_t i = 0;
  switch (qy.kind) {
    case MomentKind::mean: return static_cast<double>(e.expect(single(i, w.l), {}, workers));
    case MomentKind::variance: return static_cast<double>(e.expect(single(i, w.l), single(i, w.l), workers));
    case MomentKind::same_lag_cross:
      return static_cast<double>(e.expect(single(i, w.l), single(i + qy.gap, w.l), workers));
    case MomentKind::mixed_cross:
      return static_cast<double>(e.expect(single(i, w.l), single(i + qy.gap, w.q), workers));
    case MomentKind::hat_variance: return static_cast<double>(e.expect(hat(i, w), hat(i, w), workers));
    case MomentKind::hat_cross: return static_cast<double>(e.expect(hat(i, w), hat(i + qy.gap, w), workers));
    case MomentKind::block_variance:
    case MomentKind::hat_block_variance: {
      const bool is_hat = qy.kind == MomentKind::hat_block_variance;
      auto form = [&](std::int64_t k) { return is_hat ? hat(k, w) : single(k, w.l); };
      long double acc = static_cast<long double>(w.m) * e.expect(form(i), form(i), workers);
      for (int g = 1; g <= w.m - 1; ++g)
        acc += 2.0L * (w.m - g) * e.expect(form(i), form(i + g), workers);
      return static_cast<double>(acc);
    }
  }
  return 0.0;
}

}  // namespace mdp
