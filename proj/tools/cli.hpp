#pragma once

#include <string>
#include <vector>

namespace kgds::cli {

/// Runs the command line; returns the process exit code
/// (0 ok, 2 usage or validation, 3 resource limit, 4 I/O, 1 internal).
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace kgds::cli
