#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mdp/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Near-unit-root AR(1) moderate-deviation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string out;
  std::int64_t replicates = 0;
  auto* o_config = app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  auto* o_seed = app.add_option("--seed", seed, "master seed (overrides MDP_SEED and the config)");
  auto* o_workers = app.add_option("--workers", workers, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_reps = app.add_option("--replicates", replicates, "Monte Carlo replicates")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "write simulated paths as CSV");
  auto* estimate = app.add_subcommand("estimate", "LS, YW and covariance estimates on simulated paths");
  auto* moments = app.add_subcommand("moments", "moment formulas");
  auto* moments_verify = moments->add_subcommand("verify", "closed forms against exhaustive enumeration");
  moments->require_subcommand(1);
  auto* curve = app.add_subcommand("curve", "empirical MDP rate curves along the schedule");
  auto* blocks = app.add_subcommand("blocks", "blocking conditions");
  auto* blocks_check = blocks->add_subcommand("check", "condition table, maximal inequality, block variance");
  blocks->require_subcommand(1);
  auto* schedule = app.add_subcommand("schedule", "schedule growth conditions");
  auto* schedule_check = schedule->add_subcommand("check", "accept or reject and print the condition table");
  schedule->require_subcommand(1);
  auto* clt = app.add_subcommand("clt", "KS distance of the standardized LS error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mdp::cli::kConfigError;
  }

  return mdp::cli::guarded(std::cerr, [&] {
    mdp::Overrides flags;
    if (*o_seed) flags.seed = seed;
    if (*o_workers) flags.workers = workers;
    if (*o_out) flags.out = out;
    if (*o_reps) flags.replicates = replicates;
    const auto path = *o_config ? std::optional<std::string>(config_path) : std::nullopt;
    const mdp::ExperimentConfig config = mdp::resolve_config(path, flags);
    using namespace mdp::cli;
    if (simulate->parsed()) return cmd_simulate(config, std::cout);
    if (estimate->parsed()) return cmd_estimate(config, std::cout);
    if (moments_verify->parsed()) return cmd_verify_moments(config, std::cout);
    if (curve->parsed()) return cmd_curve(config, std::cout);
    if (blocks_check->parsed()) return cmd_blocks(config, std::cout);
    if (schedule_check->parsed()) return cmd_schedule(config, std::cout);
    if (clt->parsed()) return cmd_clt(config, std::cout);
    return static_cast<int>(kConfigError);
  });
}
