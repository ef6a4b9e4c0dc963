#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aircomp::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kIo = 3,
  kInfeasible = 4,
};

/// Runs `aircomp <args...>`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aircomp::cli
