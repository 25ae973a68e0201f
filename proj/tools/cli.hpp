#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sparsefd::cli {

// Runs the command line (args excludes the program name). Primary output goes
// to `out`, diagnostics to `err`. Returns the process exit code:
// 0 success, 1 usage error, 2 data error, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sparsefd::cli
