#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bidfm::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumericFailure = 3 };

// Runs the command line in-process. Reports go to `out` unless --output
// names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace bidfm::cli
