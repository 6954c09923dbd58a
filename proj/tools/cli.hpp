#pragma once

#include <iosfwd>

namespace ntscorisk::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kFitError = 3,
  kWeightsError = 4,
  kNumericalError = 5,
};

// Parses argv, runs one subcommand and maps library errors to exit codes.
// Results without an --output path go to `out`; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ntscorisk::cli
