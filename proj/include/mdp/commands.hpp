#pragma once

// Command bodies behind the CLI. Each writes its files under
// config.output_dir, logs to `log`, and returns the process exit code.

#include <functional>
#include <iosfwd>

#include "mdp/config.hpp"
#include "mdp/montecarlo.hpp"
#include "mdp/verify.hpp"

namespace mdp::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kVerificationFailure = 3, kInconclusive = 4 };

/// Curve CSV rows for curves of one spec, in the given order.
void write_curve_csv(std::ostream& out, const std::vector<RateCurve>& curves);

int cmd_simulate(const ExperimentConfig& c, std::ostream& log);
int cmd_estimate(const ExperimentConfig& c, std::ostream& log);
/// `closed` replaces the closed forms under test (negative fixtures).
int cmd_verify_moments(const ExperimentConfig& c, std::ostream& log, const ClosedFormFn& closed = closed_form);
int cmd_curve(const ExperimentConfig& c, std::ostream& log);
int cmd_blocks(const ExperimentConfig& c, std::ostream& log);
int cmd_schedule(const ExperimentConfig& c, std::ostream& log);
int cmd_clt(const ExperimentConfig& c, std::ostream& log);

/// Runs fn, mapping configuration-type errors to kConfigError with the
/// message on `err`.
int guarded(std::ostream& err, const std::function<int()>& fn);

}  // namespace mdp::cli
