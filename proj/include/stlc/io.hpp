#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "stlc/control_synthesis.hpp"
#include "stlc/moment_solver.hpp"
#include "stlc/schrodinger_sim.hpp"

namespace stlc {

inline constexpr const char* kVersion = "0.1.0";

/// Provenance stamped on every artifact.
struct ArtifactMeta {
  std::string config_hash;
  std::string version = kVersion;
};

/// SHA-256 of the canonical (sorted-key, compact) JSON dump.
std::string config_hash(const nlohmann::json& config);

/// Write via a temporary sibling and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string csv_header_comment(const ArtifactMeta& meta);

/// Rows of comma-separated numbers; '#' lines and one non-numeric header row are skipped.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path);

std::string control_csv(const ControlSignal& u, const ArtifactMeta& meta, double time_offset = 0.0);
nlohmann::json control_sidecar(const ControlSignal& u, const Settings& cfg, const ArtifactMeta& meta);
/// Two-column (t, u) file on a uniform grid starting at 0, as an order-0 signal.
ControlSignal read_control_csv(const std::filesystem::path& path);

std::string trajectory_csv(const Trajectory& traj, const TimeGrid& grid, const ArtifactMeta& meta, int stride = 1,
                           double time_offset = 0.0);
std::string dipole_csv(const DipoleOperator& D, const ArtifactMeta& meta);

/// Rows (index, Re, Im); index -q >= -n is the polynomial target d_{-q}.
MomentVector read_moment_targets(const std::filesystem::path& path, int ladder_size);

nlohmann::json to_json(const SolverReport& r);
nlohmann::json to_json(const SynthesisReport& r);
nlohmann::json state_to_json(const ModalState& s);
ModalState state_from_json(const nlohmann::json& j, int j_max);

nlohmann::json with_meta(nlohmann::json body, const ArtifactMeta& meta);
std::string dump(const nlohmann::json& j);

}  // namespace stlc
