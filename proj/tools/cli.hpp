#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace slfnet::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kDiverged = 3 };

// Runs one `slfnet <command> ...` invocation. `args` excludes the program name.
// Results go to `out`, diagnostics to `err`; the return value is the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slfnet::cli
