#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "stlc/errors.hpp"
#include "stlc/scenario_config.hpp"

using namespace stlc;
using nlohmann::json;

namespace {

json base() {
  return json::parse(R"({"T": 1.0, "j_max": 16, "n_steps": 1024, "J": "1..6", "mu": "x2"})");
}

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(IndexSet, Expressions) {
  EXPECT_EQ(parse_index_set("1..4"), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(parse_index_set("2..10:4"), (std::vector<int>{2, 6, 10}));
  EXPECT_EQ(parse_index_set("5, 1, 3"), (std::vector<int>{1, 3, 5}));
  EXPECT_EQ(parse_index_set(json::array({4, 2})), (std::vector<int>{2, 4}));
  EXPECT_EQ(parse_index_set("1..2, 7"), (std::vector<int>{1, 2, 7}));
  EXPECT_THROW(parse_index_set("0..3"), ConfigError);
  EXPECT_THROW(parse_index_set("1,1"), ConfigError);
  EXPECT_THROW(parse_index_set("4..2"), ConfigError);
  EXPECT_THROW(parse_index_set("a..b"), ConfigError);
  EXPECT_THROW(parse_index_set(""), ConfigError);
}

TEST(Config, Defaults) {
  const ScenarioConfig c = parse_config(base());
  EXPECT_EQ(c.T0, 0.0);
  EXPECT_EQ(c.p, 0);
  EXPECT_EQ(c.control.kind, "zero");
  EXPECT_FALSE(c.sweep.has_value());
  EXPECT_EQ(c.settings.tol, Settings{}.tol);
}

TEST(Config, MissingFieldIsNamed) {
  for (const char* f : {"T", "j_max", "n_steps", "J", "mu"}) {
    json j = base();
    j.erase(f);
    EXPECT_NE(error_of(j).find(std::string("'") + f + "'"), std::string::npos) << f;
  }
}

TEST(Config, InvariantViolations) {
  json j = base();
  j["T0"] = 1.0;
  EXPECT_NE(error_of(j).find("'T'"), std::string::npos);
  j = base();
  j["J"] = "1..20";
  EXPECT_NE(error_of(j).find("exceeds j_max"), std::string::npos);
  j = base();
  j["tolerances"] = {{"tol", -1.0}};
  EXPECT_NE(error_of(j).find("tolerances.tol"), std::string::npos);
  j = base();
  j["tolerances"] = {{"nonsense", 1.0}};
  EXPECT_NE(error_of(j).find("unknown tolerance"), std::string::npos);
  j = base();
  j["mu"] = "x3";
  EXPECT_NE(error_of(j).find("'mu'"), std::string::npos);
  j = base();
  j["control"] = {{"kind", "file"}};
  EXPECT_NE(error_of(j).find("'path'"), std::string::npos);
}

TEST(Config, OrderingIsRecordedNotEnforced) {
  json j = base();
  j["p"] = 0;
  j["k"] = 1;
  const ScenarioConfig c = parse_config(j);
  EXPECT_FALSE(c.scenario().ordering_holds);
}

TEST(Config, TolerancesAndSweep) {
  json j = base();
  j["tolerances"] = {{"tol", 1e-6}, {"n_start", 8}, {"gram_cond_max", 1e10}};
  j["sweep"] = json::parse(R"({"remainder": {"eps": [0.1, 0.01]}, "contraction": {"N": [8, 16]}})");
  const ScenarioConfig c = parse_config(j);
  EXPECT_EQ(c.settings.tol, 1e-6);
  EXPECT_EQ(c.settings.n_start, 8);
  ASSERT_TRUE(c.sweep);
  EXPECT_TRUE(c.sweep->remainder);
  EXPECT_FALSE(c.sweep->ratio);
  EXPECT_EQ(c.sweep->N_values, (std::vector<int>{8, 16}));

  j["sweep"] = json::object();
  const ScenarioConfig e = parse_config(j);
  EXPECT_TRUE(e.sweep_block_present);
  EXPECT_FALSE(e.sweep);
}

TEST(Config, WindowScenario) {
  json j = base();
  j["T0"] = 0.25;
  j["T"] = 1.25;
  j["mu"] = json::array({0.0, 0.0, 1.0});
  const Scenario s = parse_config(j).scenario();
  EXPECT_DOUBLE_EQ(s.grid.T, 1.0);
  EXPECT_EQ(s.grid.n_steps, 1024);
}

TEST(Config, ControlWaveforms) {
  json j = base();
  j["control"] = {{"kind", "sine"}, {"amplitude", 0.5}, {"frequency", 2.0}};
  const ScenarioConfig c = parse_config(j);
  const ControlSignal u = c.control_signal(TimeGrid(1.0, 1000));
  EXPECT_NEAR(u.sup_norm(), 0.5, 1e-6);
  EXPECT_NEAR(u.value(0.125), 0.5, 1e-12);
}

TEST(ConfigFile, TomlIsRedirectedAndJsonErrorsCarryPosition) {
  const auto dir = std::filesystem::temp_directory_path() / "stlc_cfg_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "a.toml") << "T = 1\n";
  try {
    load_config_file(dir / "a.toml");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("python -m stlc"), std::string::npos);
  }
  std::ofstream(dir / "b.json") << "{\n  \"T\": 1,\n  \"j_max\": ,\n}\n";
  try {
    load_config_file(dir / "b.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::ofstream(dir / "c.json") << "// comment\n{\"T\": 1}\n";
  EXPECT_EQ(load_config_file(dir / "c.json")["T"], 1);
}
