#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace entsplit::cli {

enum ExitCode : int {
  kHolds = 0,
  kFails = 1,
  kInconclusive = 2,
  kUsageError = 3,
};

/// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entsplit::cli
