#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "l1pca/error.hpp"

namespace l1pca {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitNotConverged = 3,
  kExitNumerical = 4,
};

int exit_code_for(ErrorKind kind);

// Entry point behind the l1pca executable. `args` excludes the program name.
// Subcommands: generate, solve, compare, verify, cluster. A JSON object given
// with --config supplies defaults for any flag not on the command line.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace l1pca
