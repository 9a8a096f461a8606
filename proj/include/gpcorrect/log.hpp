#pragma once

#include <functional>
#include <string>

namespace gpc::log {

/// 0 = silent, 1 = warnings (default), 2 = info.
void set_verbosity(int level);
int verbosity();

void warn(const std::string& message);
void info(const std::string& message);

}  // namespace gpc::log
