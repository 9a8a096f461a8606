#include "gpcorrect/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace gpc::log {
namespace {

std::atomic<int> g_level{1};
std::mutex g_mutex;

}  // namespace

void set_verbosity(int level) { g_level = level; }
int verbosity() { return g_level; }

void warn(const std::string& message) {
  if (g_level < 1) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "warning: " << message << '\n';
}

void info(const std::string& message) {
  if (g_level < 2) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << message << '\n';
}

}  // namespace gpc::log
