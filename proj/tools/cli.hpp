#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roughldp::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int { kOk = 0, kValidationFailure = 1, kSolverFailure = 2, kConfigError = 64 };

/// Runs `roughldp <command> [flags]` with argv[0] as program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace roughldp::cli
