#pragma once

#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fvproj/linalg.hpp"

namespace fvproj {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration file that cannot be read.
class ConfigFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters of a time-dependent run.
struct RunConfig {
  /// Mesh file; when empty, the acute square family at `mesh_level` is used.
  std::string mesh;
  int mesh_level = 0;
  double k = 1e-2;
  int steps = 200;
  double reynolds = 100.0;
  std::string problem = "manufactured-A";
  SolverConfig momentum_solver{SolverMethod::bicgstab, 1e-12, 1e-14, 0, 50, true};
  SolverConfig pressure_solver{SolverMethod::cg, 1e-10, 1e-14, 0, 50, true};
  /// Used for the initial Leray projection and the first projection.
  SolverConfig init_solver{SolverMethod::cg, 1e-13, 1e-300, 0, 50, true};
  std::string output_dir;
  /// Snapshot every `cadence` steps; 0 disables snapshots.
  int cadence = 0;
  bool allow_degenerate = false;
  /// Multiplies the velocity after every step. Values other than 1 are only
  /// useful as a negative control for the stability monitors.
  double perturbation_gain = 1.0;

  /// Throws ConfigError unless k > 0, steps >= 2, reynolds > 0 and the
  /// solver settings are valid.
  void validate() const;
};

/// Applies one "key=value" assignment. Recognized keys: mesh, level, k, steps
/// (alias N), Re (alias reynolds), problem, momentum_solver, pressure_solver,
/// momentum_rtol, pressure_rtol, solver_rtol (both), atol, max_iterations,
/// restart, output_dir (alias out), cadence, allow_degenerate, perturbation_gain.
void apply_setting(RunConfig& config, std::string_view assignment);

/// Reads key=value lines ('#' starts a comment) on top of `base`.
RunConfig parse_run_config(std::istream& in, RunConfig base = {}, std::string_view source = "<config>");
/// Throws ConfigFileError when the file cannot be opened.
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace fvproj
