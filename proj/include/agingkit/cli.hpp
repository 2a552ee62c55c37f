#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace agingkit {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,  // unexpected internal error
    kExitInput = 2,    // unreadable or malformed input, bad flags
    kExitDomain = 3,   // value outside its domain, invariant violation
};

/// Runs the `agingkit` command line. `args` excludes the program name.
/// Results go to `out`, diagnostics to `err`.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace agingkit
