#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace retro::cli {

/// Exit codes: 0 every check passed, 1 input or validation error, 2 numeric
/// error or a failed check.
enum ExitCode : int { kPass = 0, kInputError = 1, kNumericError = 2 };

/// Runs one command line (without the program name). Reports go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace retro::cli
