#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "stlc/cli.hpp"
#include "stlc/control_synthesis.hpp"
#include "stlc/io.hpp"
#include "stlc/scenario_config.hpp"

using namespace stlc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "stlc_cli_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json base_config() {
  return json::parse(R"({"T": 1.0, "j_max": 32, "n_steps": 16384, "p": 0, "k": 1, "J": "1..12", "mu": "x2",
                         "seed": 7})");
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct CmdResult {
  int code;
  std::string out, err;
};

CmdResult run(const std::string& cmd, const json& cfg, const fs::path& dir, CliOptions opts = {}) {
  opts.out_dir = dir.string();
  std::ostringstream out, err;
  const int code = run_command(cmd, cfg, opts, out, err);
  return {code, out.str(), err.str()};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST(Cli, SimulateFreeGroundState) {
  const fs::path d = scratch("sim");
  json cfg = base_config();
  cfg["n_steps"] = 1024;
  const CmdResult r = run("simulate", cfg, d);
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = read_json(d / "simulate.json");
  EXPECT_LT(rep["distance_to_free_flight"].get<double>(), 1e-10);
  EXPECT_TRUE(rep["conserved"].get<bool>());
  EXPECT_EQ(rep["meta"]["version"], kVersion);
  EXPECT_EQ(slurp(d / "trajectory.csv").rfind("# stlc 0.1.0 config_hash=", 0), 0u);
}

TEST(Cli, SimulateDtHalvingTable) {
  const fs::path d = scratch("halve");
  json cfg = base_config();
  cfg["n_steps"] = 1024;
  cfg["control"] = {{"kind", "smooth"}, {"amplitude", 1.0}, {"frequency", 4.0}};
  CliOptions o;
  o.dt_halve = true;
  const CmdResult r = run("simulate", cfg, d, o);
  ASSERT_EQ(r.code, 0) << r.err;
  const json t = read_json(d / "simulate.json")["self_convergence"];
  ASSERT_EQ(t.size(), 2u);
  EXPECT_NEAR(t[1]["ratio"].get<double>(), 4.0, 0.3);
  EXPECT_TRUE(fs::exists(d / "self_convergence.csv"));
}

TEST(Cli, BinaryReportsMissingFieldWithExitTwo) {
  const fs::path d = scratch("missing");
  json cfg = base_config();
  cfg.erase("n_steps");
  std::ofstream(d / "cfg.json") << cfg.dump();
  const std::string cmd = std::string(STLC_CLI_PATH) + " simulate --config " + (d / "cfg.json").string() + " 2> " +
                          (d / "err.txt").string();
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_NE(slurp(d / "err.txt").find("'n_steps'"), std::string::npos);
}

TEST(Cli, BinaryUnknownFlagIsInputError) {
  const std::string cmd = std::string(STLC_CLI_PATH) + " verify --bogus > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

TEST(Cli, SolveMomentTargets) {
  const fs::path d = scratch("moment");
  std::ofstream(d / "zero.csv") << "index,re,im\n0,0,0\n";
  std::ofstream(d / "one.csv") << "index,re,im\n3,0.25,-0.5\n";
  std::ofstream(d / "bad.csv") << "index,re,im\n3,x,1\n";
  std::ofstream(d / "cplx.csv") << "index,re,im\n0,1,0.5\n";
  CliOptions o;
  o.targets = (d / "zero.csv").string();
  CmdResult r = run("solve-moment", base_config(), d / "z", o);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_control_csv(d / "z" / "control.csv").sup_norm(), 0.0);

  o.targets = (d / "one.csv").string();
  r = run("solve-moment", base_config(), d / "o", o);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(read_json(d / "o" / "solver_report.json")["relative_residual"].get<double>(), 1e-6);

  o.targets = (d / "bad.csv").string();
  r = run("solve-moment", base_config(), d / "b", o);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.csv:2"), std::string::npos) << r.err;

  o.targets = (d / "cplx.csv").string();
  EXPECT_EQ(run("solve-moment", base_config(), d / "c", o).code, 2);
}

TEST(Cli, ControlModes) {
  const fs::path d = scratch("control");
  std::ofstream(d / "gg.json") << R"({"psi0": "ground", "psif": "ground"})";
  CliOptions o;
  o.mode = "nonlinear";
  o.endpoints = (d / "gg.json").string();
  CmdResult r = run("control", base_config(), d / "gg", o);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_control_csv(d / "gg" / "control.csv").sup_norm(), 0.0);

  const Scenario scn = parse_config(base_config()).scenario();
  const ControlTask t = random_task(scn, 1e-3, 3);
  std::ofstream(d / "task.json") << json{{"psi0", state_to_json(t.psi0)}, {"psif", state_to_json(t.psif)}}.dump();
  o.endpoints = (d / "task.json").string();
  r = run("control", base_config(), d / "nl", o);
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = read_json(d / "nl" / "synthesis_report.json");
  EXPECT_LE(rep["final_error"].get<double>(), 1e-8);
  EXPECT_GE(rep["history"].size(), 1u);

  std::ofstream(d / "off.json") << R"({"psi0": "ground", "psif": [[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],)"
                                   R"([0,0],[0,0],[0,0],[0,0],[0,0],[0.001,0]]})";
  o.endpoints = (d / "off.json").string();
  r = run("control", base_config(), d / "off", o);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("SupportViolation"), std::string::npos);

  json capped = base_config();
  capped["tolerances"] = {{"max_fixed_point_iters", 1}, {"synthesis_tol", 1e-30}};
  o.endpoints = (d / "task.json").string();
  r = run("control", capped, d / "cap", o);
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("history:"), std::string::npos);
  EXPECT_FALSE(read_json(d / "cap" / "synthesis_report.json")["converged"].get<bool>());

  std::ofstream(d / "lin.json") << R"({"psi0": "zero", "psif": [[0,0],[0.001,0.002]]})";
  o.mode = "linear";
  o.endpoints = (d / "lin.json").string();
  r = run("control", base_config(), d / "lin", o);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(read_json(d / "lin" / "synthesis_report.json")["final_error"].get<double>(), 1e-8);
}

TEST(Cli, VerifyOutcomes) {
  const fs::path d = scratch("verify");
  CmdResult r = run("verify", base_config(), d / "ok");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(read_json(d / "ok" / "verify.json")["passed"].get<bool>());

  json coarse = base_config();
  coarse["n_steps"] = 16;
  coarse["control"] = {{"kind", "sine"}, {"amplitude", 40.0}, {"frequency", 1.0}};
  r = run("verify", coarse, d / "coarse");
  EXPECT_EQ(r.code, 1);
  bool unitarity_failed = false;
  const json coarse_report = read_json(d / "coarse" / "verify.json");
  for (const auto& c : coarse_report["checks"]) {
    if (c["name"] == "unitarity") unitarity_failed = c["status"] == "fail";
  }
  EXPECT_TRUE(unitarity_failed);

  json one = base_config();
  one["mu"] = "one";
  one["J"] = "1..2";
  r = run("verify", one, d / "one");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL decay"), std::string::npos) << r.out;
}

TEST(Cli, SweepsAndDeterminism) {
  const fs::path d = scratch("sweep");
  json cfg = base_config();
  cfg["sweep"] = json::parse(R"({"remainder": {"eps": [0.1, 0.03, 0.01, 0.003, 0.001]},
                                 "ratio": {"n_samples": 4, "delta": 0.001},
                                 "contraction": {"N": [8, 16], "ladder_size": 40, "n_steps": 16384, "samples": 2}})");
  CliOptions one, three;
  three.threads = 3;
  CmdResult a = run("sweep", cfg, d / "a", one);
  CmdResult b = run("sweep", cfg, d / "b", three);
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  for (const char* f : {"remainder_sweep.csv", "ratio_sweep.csv", "contraction_sweep.csv", "sweep_summary.json"}) {
    EXPECT_EQ(slurp(d / "a" / f), slurp(d / "b" / f)) << f;
  }
  const json s = read_json(d / "a" / "sweep_summary.json");
  EXPECT_NEAR(s["remainder"]["slope"].get<double>(), 2.0, 0.1);
  EXPECT_TRUE(s["contraction"]["monotone"].get<bool>());

  cfg["sweep"] = json::object();
  EXPECT_EQ(run("sweep", cfg, d / "e").code, 2);
  cfg.erase("sweep");
  EXPECT_EQ(run("sweep", cfg, d / "m").code, 2);
}

TEST(Cli, SeedOverrideChangesHash) {
  const fs::path d = scratch("seed");
  json cfg = base_config();
  cfg["n_steps"] = 512;
  CliOptions o;
  run("simulate", cfg, d / "a", o);
  o.seed = 99;
  run("simulate", cfg, d / "b", o);
  EXPECT_NE(read_json(d / "a" / "simulate.json")["meta"]["config_hash"],
            read_json(d / "b" / "simulate.json")["meta"]["config_hash"]);
}
