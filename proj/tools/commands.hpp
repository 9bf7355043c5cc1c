#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace emvl::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kInvalid = 3,
    kUnreachable = 4,
};

/// Runs one command line (without the program name). Human-readable progress
/// goes to `out`, diagnostics to `err`; data files go under --out-dir.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace emvl::cli
