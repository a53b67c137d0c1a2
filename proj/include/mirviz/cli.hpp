#pragma once

#include <string>
#include <vector>

namespace mirviz::cli {

/// Exit codes: 0 success, 1 usage error, 2 data or processing error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace mirviz::cli
