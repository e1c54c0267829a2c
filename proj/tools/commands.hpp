#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isolab {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    kExitDoesNotApply = 2,
    kExitUsage = 64,
};

/// Runs one subcommand. `args` excludes the program name. Progress and
/// errors go to `err`, usage and help text to `out`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_command(int argc, char** argv);

}  // namespace isolab
