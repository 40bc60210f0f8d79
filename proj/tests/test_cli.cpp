#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "mdp/commands.hpp"
#include "mdp/error.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("mdp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("MDP_SEED");
  }
  void TearDown() override { fs::remove_all(dir_); }

  mdp::ExperimentConfig config(const json& j, const std::string& sub = "out") {
    auto c = mdp::parse_config(j);
    c.output_dir = (dir_ / sub).string();
    c.workers = 1;
    c.validate();
    return c;
  }

  int run(const std::string& args) {
    const std::string cmd = std::string(MDP_CLI_PATH) + " " + args + " > " + (dir_ / "stdout.txt").string() + " 2> " +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  }

  fs::path dir_;
  std::ostringstream log_;
};

TEST_F(Cli, SimulateWritesStateRowsAndIsDeterministic) {
  const json j{{"simulate", {{"n", 100}, {"theta", 0.5}}}, {"master_seed", 3}};
  ASSERT_EQ(mdp::cli::cmd_simulate(config(j, "a"), log_), 0);
  ASSERT_EQ(mdp::cli::cmd_simulate(config(j, "b"), log_), 0);
  const auto rows = lines(dir_ / "a" / "path_0.csv");
  EXPECT_EQ(rows.front(), "k,X_k,xi_k");
  EXPECT_EQ(rows.size(), 102u);
  EXPECT_EQ(slurp(dir_ / "a" / "path_0.csv"), slurp(dir_ / "b" / "path_0.csv"));
  json k = j;
  k["master_seed"] = 4;
  ASSERT_EQ(mdp::cli::cmd_simulate(config(k, "c"), log_), 0);
  EXPECT_NE(slurp(dir_ / "a" / "path_0.csv"), slurp(dir_ / "c" / "path_0.csv"));
}

TEST_F(Cli, MalformedConfigNamesTheKey) {
  std::ofstream(dir_ / "bad.json") << R"({"replicates": 10, "schedule": {"beta": 0.1, "gama_b": 0.1}})";
  EXPECT_EQ(run("simulate --config " + (dir_ / "bad.json").string()), 2);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("schedule.gama_b"), std::string::npos);
  std::ofstream(dir_ / "bad2.json") << R"({"replicates": "many"})";
  EXPECT_EQ(run("simulate --config " + (dir_ / "bad2.json").string()), 2);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("replicates"), std::string::npos);
  std::ofstream(dir_ / "bad3.json") << R"({"replicates": )";
  EXPECT_EQ(run("simulate --config " + (dir_ / "bad3.json").string()), 2);
}

TEST_F(Cli, PrecedenceFlagsOverEnvOverFile) {
  std::ofstream(dir_ / "c.json") << R"({"master_seed": 5, "replicates": 20})";
  const std::string file = (dir_ / "c.json").string();
  EXPECT_EQ(mdp::resolve_config(file, {}).master_seed, 5u);
  setenv("MDP_SEED", "17", 1);
  EXPECT_EQ(mdp::resolve_config(file, {}).master_seed, 17u);
  mdp::Overrides flags;
  flags.seed = 99;
  flags.replicates = 7;
  const auto c = mdp::resolve_config(file, flags);
  EXPECT_EQ(c.master_seed, 99u);
  EXPECT_EQ(c.replicates, 7);
  setenv("MDP_SEED", "x1", 1);
  EXPECT_THROW(mdp::resolve_config(file, {}), mdp::ConfigError);
  unsetenv("MDP_SEED");
  EXPECT_EQ(mdp::resolve_config(std::nullopt, {}).master_seed, 0u);
}

TEST_F(Cli, ScheduleCheckAcceptsAndRejects) {
  std::ofstream(dir_ / "ok.json") << R"({"schedule": {"beta": 0.15, "gamma_b": 0.1, "n": [10000, 1000000]}})";
  EXPECT_EQ(run("schedule check --config " + (dir_ / "ok.json").string() + " --out " + (dir_ / "s").string()), 0);
  EXPECT_EQ(lines(dir_ / "s" / "schedule.csv").size(), 3u);
  EXPECT_EQ(lines(dir_ / "s" / "schedule_trends.csv").size(), 7u);
  std::ofstream(dir_ / "no.json") << R"({"schedule": {"beta": 0.2, "gamma_b": 0.2}})";
  EXPECT_EQ(run("schedule check --config " + (dir_ / "no.json").string() + " --out " + (dir_ / "t").string()), 2);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("1/2 - 2*beta - gamma_b > 0"), std::string::npos);
}

TEST_F(Cli, VerifyMomentsPassesAndCatchesInjectedFormula) {
  const json j{{"moments", {{"m_max_values", {1}}, {"m_span", 2}, {"thetas", {0.5}}, {"laws", {"three-point"}}}}};
  const auto c = config(j);
  EXPECT_EQ(mdp::cli::cmd_verify_moments(c, log_), 0);
  const auto rows = lines(dir_ / "out" / "moments_verify.csv");
  EXPECT_EQ(rows.front(), "law,theta,m_max,m,kind,l,q,gap,closed_form,oracle,abs_diff,status");
  EXPECT_GT(rows.size(), 20u);
  const auto wrong = [](const mdp::MomentQuery& q) {
    const double v = mdp::closed_form(q);
    return q.kind == mdp::MomentKind::same_lag_cross ? v * (1.0 + 1e-6) + 1e-9 : v;
  };
  EXPECT_EQ(mdp::cli::cmd_verify_moments(c, log_, wrong), mdp::cli::kVerificationFailure);
  int fails = 0;
  for (const auto& r : lines(dir_ / "out" / "moments_verify.csv")) fails += r.ends_with(",fail");
  EXPECT_GT(fails, 0);
}

TEST_F(Cli, VerifyMomentsSkipsPastGuard) {
  const json j{{"moments", {{"m_max_values", {1}}, {"m_span", 1}, {"thetas", {0.5}}, {"laws", {"three-point"}}}}};
  (void)config(j);
  mdp::SweepSpec wide;
  wide.m_max_values = {8};
  wide.m_span = 1;
  wide.thetas = {0.5};
  wide.laws = {"three-point"};
  const auto r = mdp::verify_moments(wide);
  EXPECT_GT(r.skipped, 0);
  EXPECT_EQ(r.failures, 0);
}

TEST_F(Cli, CurveSmokeSchemaAndDeterminism) {
  const json j{{"schedule", {{"points", {{{"n", 1000}, {"theta", 0.7}, {"b", 1.5}, {"m", 6}},
                                        {{"n", 2000}, {"theta", 0.75}, {"b", 1.6}, {"m", 6}}}}}},
               {"kinds", {"covariance", "linear", "estimator-ls", "estimator-yw"}},
               {"lags", {0, 1}},
               {"replicates", 1000},
               {"master_seed", 12}};
  auto c = config(j, "w1");
  ASSERT_EQ(mdp::cli::cmd_curve(c, log_), 0);
  const auto rows = lines(dir_ / "w1" / "curve_covariance_l0.csv");
  EXPECT_EQ(rows.front(), "n,theta,b,m,kind,r,hits,replicates,p_hat,ci_low,ci_high,empirical_rate,theoretical_rate");
  EXPECT_EQ(rows.size(), 1u + 2u * 12u);
  EXPECT_EQ(split(rows[1]).size(), 13u);
  c.workers = 3;
  c.output_dir = (dir_ / "w3").string();
  ASSERT_EQ(mdp::cli::cmd_curve(c, log_), 0);
  for (const char* f : {"curve_covariance_l0.csv", "curve_covariance_l1.csv", "curve_linear.csv",
                        "curve_estimator-ls.csv", "curve_estimator-yw.csv"})
    EXPECT_EQ(slurp(dir_ / "w1" / f), slurp(dir_ / "w3" / f)) << f;

  // LS and YW share everything but the estimator-driven columns
  const auto ls = lines(dir_ / "w1" / "curve_estimator-ls.csv"), yw = lines(dir_ / "w1" / "curve_estimator-yw.csv");
  ASSERT_EQ(ls.size(), yw.size());
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto a = split(ls[i]), b = split(yw[i]);
    for (int col : {0, 1, 2, 3, 5, 7, 12}) EXPECT_EQ(a[col], b[col]);
    EXPECT_EQ(a[4], "estimator-ls");
    EXPECT_EQ(b[4], "estimator-yw");
  }
  const json summary = json::parse(slurp(dir_ / "w1" / "curve_summary.json"));
  EXPECT_EQ(summary["run_id"].get<std::string>().size(), 12u);
  EXPECT_EQ(summary["config"]["alpha0"], 4.0);
  EXPECT_EQ(summary["config"]["replicates"], 1000);
  EXPECT_EQ(summary["curves"].size(), 5u);
}

TEST_F(Cli, CurveDegenerateLinearExitsNonZero) {
  std::ofstream(dir_ / "d.json") << R"({"kinds": ["linear"], "coefficients": [1, -1], "replicates": 10,
    "schedule": {"points": [{"n": 500, "theta": 0.5, "b": 1.5, "m": 4}]}})";
  EXPECT_EQ(run("curve --config " + (dir_ / "d.json").string() + " --out " + (dir_ / "o").string()), 2);
  EXPECT_NE(slurp(dir_ / "stderr.txt").find("degenerate"), std::string::npos);
}

TEST_F(Cli, BlocksAndCltWriteTables) {
  const json j{{"schedule", {{"points", {{{"n", 100000}, {"theta", 0.8}, {"b", 1.5}, {"m", 8}}}}}},
               {"blocks", {{"replicates", 2000}, {"maximal_n", 2000}, {"maximal_t", 300}, {"variance_replicates", 500}}},
               {"clt", {{"theta", 0.9}, {"n", 2000}}},
               {"replicates", 500}};
  const auto c = config(j);
  const int code = mdp::cli::cmd_blocks(c, log_);
  EXPECT_TRUE(code == 0 || code == mdp::cli::kInconclusive);
  EXPECT_EQ(lines(dir_ / "out" / "blocks.csv").size(), 1u + 5u);
  EXPECT_EQ(lines(dir_ / "out" / "maximal.csv").size(), 2u);
  EXPECT_EQ(lines(dir_ / "out" / "variance.csv").size(), 2u);
  EXPECT_EQ(mdp::cli::cmd_clt(c, log_), 0);
  const auto clt = lines(dir_ / "out" / "clt.csv");
  ASSERT_EQ(clt.size(), 2u);
  EXPECT_EQ(split(clt[1]).back(), "true");
}

TEST_F(Cli, EstimateReportsEstimators) {
  const json j{{"simulate", {{"n", 500}, {"theta", 0.6}, {"paths", 2}}}, {"lags", {0, 1}}};
  ASSERT_EQ(mdp::cli::cmd_estimate(config(j), log_), 0);
  const auto rows = lines(dir_ / "out" / "estimates.csv");
  EXPECT_EQ(rows.size(), 1u + 4u);
  const auto f = split(rows[1]);
  EXPECT_NEAR(std::stod(f[3]), 0.6, 0.15);
}

TEST_F(Cli, BinaryRunsEveryCommand) {
  std::ofstream(dir_ / "c.json") << R"({"simulate": {"n": 50}, "replicates": 1000,
    "schedule": {"points": [{"n": 1000, "theta": 0.5, "b": 1.5, "m": 4}]},
    "moments": {"m_max_values": [1], "m_span": 1, "thetas": [0.3], "laws": ["rademacher"]},
    "blocks": {"replicates": 200, "maximal_n": 200, "maximal_t": 100, "variance_replicates": 50},
    "clt": {"theta": 0.5, "n": 200}})";
  const std::string common = " --config " + (dir_ / "c.json").string() + " --out " + (dir_ / "o").string() + " --workers 2";
  EXPECT_EQ(run("simulate" + common), 0);
  EXPECT_EQ(run("estimate" + common), 0);
  EXPECT_EQ(run("moments verify" + common), 0);
  EXPECT_EQ(run("curve" + common + " --seed 4 --replicates 1000"), 0);
  const int blocks = run("blocks check" + common);
  EXPECT_TRUE(blocks == 0 || blocks == 4);
  EXPECT_EQ(run("schedule check" + common), 0);
  EXPECT_EQ(run("clt" + common), 0);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("curve --workers -1"), 2);
}

}  // namespace

namespace {

TEST_F(Cli, OtherCommandsIndependentOfWorkers) {
  const json j{{"schedule", {{"points", {{{"n", 20000}, {"theta", 0.8}, {"b", 1.5}, {"m", 8}}}}}},
               {"blocks", {{"replicates", 3000}, {"maximal_n", 1000}, {"maximal_t", 100}, {"variance_replicates", 300}}},
               {"moments", {{"m_max_values", {1}}, {"m_span", 3}, {"thetas", {0.3}}, {"laws", {"three-point"}}}},
               {"clt", {{"theta", 0.9}, {"n", 1000}}},
               {"replicates", 1000}};
  for (int w : {1, 3}) {
    auto c = config(j, "w" + std::to_string(w));
    c.workers = w;
    mdp::cli::cmd_blocks(c, log_);
    mdp::cli::cmd_clt(c, log_);
    mdp::cli::cmd_verify_moments(c, log_);
  }
  for (const char* f : {"blocks.csv", "maximal.csv", "variance.csv", "clt.csv", "moments_verify.csv"})
    EXPECT_EQ(slurp(dir_ / "w1" / f), slurp(dir_ / "w3" / f)) << f;
}

}  // namespace
