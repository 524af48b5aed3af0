#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace inspectlens::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kInputError = 2,
    kInsufficientData = 3,
    kNumericalFailure = 4,
};

/// Runs one command line (args excludes the program name). Rendered output
/// goes to `out`, diagnostics and warnings to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace inspectlens::cli
