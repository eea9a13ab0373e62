#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "kgres/cli/config.hpp"
#include "kgres/quadratic_form.hpp"

namespace kgres::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kConfigError = 2, kGuardTripped = 3 };

/// Parses system.nonlinearity with system.m1, system.m2. Parse errors become ConfigError
/// carrying the column.
NonlinearSystem system_from_config(const RunConfig& cfg);

// Each command writes its files under cfg.out_dir, returns the JSON report and sets exit_code.
nlohmann::json cmd_classify(const RunConfig& cfg, int& exit_code);
nlohmann::json cmd_ode(const RunConfig& cfg, int& exit_code);
nlohmann::json cmd_pde(const RunConfig& cfg, int& exit_code);
nlohmann::json cmd_sweep(const RunConfig& cfg, int& exit_code);

/// Summarizes the reports found in a run directory.
std::string cmd_report(const std::string& out_dir, int& exit_code);

/// Dispatch by name with ConfigError / GuardError mapped to exit codes; messages go to err.
int run_command(const std::string& name, const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace kgres::cli
