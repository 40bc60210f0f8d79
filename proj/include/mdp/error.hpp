#pragma once

#include <stdexcept>
#include <string>

namespace mdp {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model, schedule or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Index or history request outside what a path retains.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A ratio estimator met an all-zero denominator.
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

/// Linear-combination rate requested with coefficients summing to zero.
class DegenerateRateError : public Error {
 public:
  using Error::Error;
};

/// Schedule fails the growth-condition exponent test.
class ScheduleInvalidError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed the assignment budget.
class EnumerationGuardError : public Error {
 public:
  using Error::Error;
};

/// Block decomposition requested on a sequence shorter than m*p.
class TooShortError : public Error {
 public:
  using Error::Error;
};

/// No admissible super-block factor exists at this schedule point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace mdp
