#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qlgc {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitNumericalError = 2,
};

/// Runs the command-line front-end on `args` (program name excluded) and
/// returns the process exit code. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qlgc
