#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rankdist::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kUsage = 2 };

/// Runs one command line (without the program name). Output goes to `out`
/// or to the --out path; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankdist::cli
