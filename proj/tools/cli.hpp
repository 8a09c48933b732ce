#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace finbath::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kConfigError = 2,
  kSingularity = 3,
};

/// Runs the command line `args` (without the program name). All normal output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace finbath::cli
