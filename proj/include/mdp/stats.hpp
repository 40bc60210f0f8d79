#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace mdp::stats {

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Wilson score interval for hits out of trials.
Interval wilson(std::int64_t hits, std::int64_t trials, double z = kZ95);

double normal_cdf(double x);

/// sup_x |F_n(x) - Phi(x)| for the standard normal Phi. Sorts a copy.
double ks_normal(std::vector<double> sample);

/// Two-sided 5% asymptotic critical value 1.358/sqrt(n).
double ks_critical_5(std::int64_t n);

/// Runs fn(i) for i in [0, count) on up to `workers` threads; each index is
/// visited exactly once. Callers write results into per-index slots.
void parallel_for(std::int64_t count, int workers, const std::function<void(std::int64_t)>& fn);

/// Workers to use: `requested` if positive, else hardware concurrency.
int resolve_workers(int requested);

}  // namespace mdp::stats
