#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polysim::runner {

enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 2,
    kExitElaboration = 3,
    kExitGuestRuntime = 4,
    kExitRunFailure = 5,
};

/// The polysim command line. `args` excludes the program name. Event lines
/// for `--log -` go to `out`; diagnostics and module output go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace polysim::runner
