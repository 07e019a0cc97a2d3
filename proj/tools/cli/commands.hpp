#pragma once

#include <iosfwd>

namespace sve::cli {

enum ExitCode : int {
  kOk = 0,
  kConditionFail = 1,
  kConfigError = 2,
  kNumericalError = 3,
  kInconclusive = 4,
};

/// Parses argv, runs one command and maps failures to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sve::cli
