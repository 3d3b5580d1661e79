#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cgq::tools {

/// Runs the command line `args` (without the program name). Results go to
/// `out`, diagnostics to `err`. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cgq::tools
