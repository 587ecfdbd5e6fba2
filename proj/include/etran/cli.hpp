#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace etran {

enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitConfig = 3 };

/// Runs one CLI invocation. `args` excludes the program name.
/// Subcommands: rank, eval, inspect, pool.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace etran
