#pragma once

#include <iosfwd>

namespace approxsym {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitModel = 2,
    kExitPivot = 3,
    kExitLaw = 4,
    kExitNonFinite = 5,
};

/// Runs `approxsym <command> ...` writing reports to `out` and diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace approxsym
