#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sparselab::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kNumericalFailure = 2,
};

/// Runs one command line (without the program name). JSON results go to
/// `out`, diagnostics and usage text to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sparselab::cli
