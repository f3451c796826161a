#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cli/config.hpp"

namespace postsel::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kNumericalError = 3, kIoError = 4 };

/// `# postsel <version> config_hash=<hex> seed=<n>`
std::string header_line(const RunConfig& config);

/// Each command writes its files under `out` and returns an exit code;
/// kNumericalError means a quadrature flagged non-convergence (files are still written).
int cmd_curves(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_selection_probs(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_convergence(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_simulate(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

}  // namespace postsel::cli
