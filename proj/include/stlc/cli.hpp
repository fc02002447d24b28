#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"

namespace stlc {

/// Exit codes of every subcommand.
enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kInputError = 2, kNoConvergence = 3 };

struct CliOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool dt_halve = false;
  std::string targets;    // solve-moment
  std::string endpoints;  // control
  std::string mode = "linear";
};

/// Runs one subcommand ("simulate", "solve-moment", "control", "verify",
/// "sweep") on an already parsed config. Never throws.
int run_command(const std::string& command, const nlohmann::json& config, const CliOptions& opts, std::ostream& out,
                std::ostream& err);

/// Full command line entry point.
int run_cli(int argc, char** argv);

}  // namespace stlc
