#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace refrev {

enum ExitCode : int { kExitOk = 0, kExitInputError = 2, kExitConfigError = 3 };

/// Runs one command line (without the program name). Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace refrev
