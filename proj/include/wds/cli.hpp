#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wds::cli {

enum ExitCode : int {
    kOk = 0,
    kFailed = 1,  // validate: invalid network; check: not physically correct
    kInconsistent = 2,
    kNonConvergence = 3,
    kNotCovered = 4,
    kUsage = 64,
    kDataError = 65,
};

/// Runs one command. args[0] is the program name. JSON goes to `out`,
/// one-line diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wds::cli
