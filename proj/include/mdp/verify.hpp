#pragma once

// Closed-form moments against the enumeration oracle over a parameter sweep.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mdp/umoments.hpp"

namespace mdp {

struct SweepSpec {
  std::vector<int> m_max_values{1, 2};
  int m_span = 6;  ///< m runs over 2 M_max + 1 .. 2 M_max + m_span
  std::vector<double> thetas{0.0, 0.3, 0.7, 0.9};
  std::vector<std::string> laws{"rademacher", "three-point"};
  int workers = 1;
  double tolerance = 1e-10;
};

struct VerifyRow {
  std::string law;
  double theta = 0.0;
  int m_max = 1;
  int m = 3;
  std::string kind;
  int l = 0;
  int q = 0;
  int gap = 0;
  double closed = 0.0;
  double oracle = 0.0;
  double diff = 0.0;
  std::string status;  ///< pass | fail | skipped | finding
};

struct VerifyReport {
  std::vector<VerifyRow> rows;
  int failures = 0;
  int skipped = 0;
  int findings = 0;  ///< rows of the printed block-variance aggregate that disagree
};

using ClosedFormFn = std::function<double(const MomentQuery&)>;

/// Finite-support law by name: rademacher | three-point.
NoiseModel finite_law(const std::string& name);

/// Checks every closed form, plus the printed block-variance aggregate, against
/// enumeration. Guard overruns are marked skipped.
VerifyReport verify_moments(const SweepSpec& spec, const ClosedFormFn& closed = closed_form);

void write_verify_csv(std::ostream& os, const VerifyReport& report);

}  // namespace mdp
