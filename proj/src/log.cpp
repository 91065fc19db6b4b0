#include "segra/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace segra {

namespace {
std::atomic<int> g_level{static_cast<int>(LogLevel::Info)};

const char* level_tag(LogLevel level) {
  switch (level) {
    case LogLevel::Error:
      return "error";
    case LogLevel::Info:
      return "info";
    default:
      return "debug";
  }
}
}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(g_level.load(std::memory_order_relaxed)); }

void set_log_level(LogLevel level) {
  g_level.store(static_cast<int>(level), std::memory_order_relaxed);
}

void init_log_level_from_env() {
  const char* env = std::getenv("SEGRA_LOG");
  if (env == nullptr) return;
  if (std::strcmp(env, "error") == 0) set_log_level(LogLevel::Error);
  else if (std::strcmp(env, "info") == 0) set_log_level(LogLevel::Info);
  else if (std::strcmp(env, "debug") == 0) set_log_level(LogLevel::Debug);
}

void log_at(LogLevel level, const char* fmt, ...) {
  if (static_cast<int>(level) > g_level.load(std::memory_order_relaxed)) return;
  std::fprintf(stderr, "[%s] ", level_tag(level));
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  va_end(args);
  std::fputc('\n', stderr);
}

}  // namespace segra
