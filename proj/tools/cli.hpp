#pragma once

#include <string>
#include <vector>

namespace gpc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Runs the command line `args` (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args);

}  // namespace gpc::cli
