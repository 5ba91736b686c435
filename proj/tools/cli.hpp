#pragma once

#include <string>
#include <vector>

namespace qpmix::cli {

/// Runs the command-line driver on argv-style arguments (args[0] is the
/// program name). Returns the process exit code: 0 success, 1 usage or
/// configuration error, 2 data error, 3 numerical error.
int run(const std::vector<std::string>& args);

}  // namespace qpmix::cli
