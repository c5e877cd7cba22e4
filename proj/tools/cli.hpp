#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace citefield::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2 };

/// Runs one command line (without the program name). Everything printed goes
/// to `out` or `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace citefield::cli
