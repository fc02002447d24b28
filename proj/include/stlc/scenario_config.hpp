#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stlc/schrodinger_sim.hpp"

namespace stlc {

struct ControlSpec {
  std::string kind = "zero";  // zero | sine | smooth | file
  double amplitude = 1.0;
  double frequency = 0.0;
  std::string path;
};

struct SweepSpec {
  bool ratio = false;
  int n_samples = 50;
  double delta = 1e-3;

  bool remainder = false;
  bool linearization = false;
  std::vector<double> eps;

  bool contraction = false;
  std::vector<int> N_values{8, 16, 32, 64};
  int ladder_size = 128;
  int contraction_steps = 262144;
  int contraction_samples = 3;
};

struct ScenarioConfig {
  double T = 1.0;
  double T0 = 0.0;
  int j_max = 0;
  int n_steps = 0;
  int p = 0;
  int k = 0;
  std::vector<int> J;
  std::string mu_name;
  std::vector<double> mu_coeffs;
  Settings settings;
  std::string output_dir = "out";
  ControlSpec control;
  nlohmann::json psi0 = "ground";
  std::optional<SweepSpec> sweep;
  bool sweep_block_present = false;
  nlohmann::json raw;

  MuSpec mu() const;
  /// Scenario on the window [T0, T] re-based to [0, T - T0].
  Scenario scenario() const;
  ControlSignal control_signal(const TimeGrid& grid) const;
};

/// Parse and validate; throws ConfigError naming the offending field.
ScenarioConfig parse_config(const nlohmann::json& j);
/// Reads a JSON config file. TOML files are handled by the Python front end.
nlohmann::json load_config_file(const std::filesystem::path& path);

/// "1..12", "2..12:2", "1,3,5", or a JSON array of integers.
std::vector<int> parse_index_set(const nlohmann::json& spec);

}  // namespace stlc
