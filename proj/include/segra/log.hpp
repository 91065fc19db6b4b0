#pragma once

#include <cstdarg>
#include <cstdio>

namespace segra {

enum class LogLevel : int { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level();
void set_log_level(LogLevel level);
// Reads SEGRA_LOG in {error, info, debug}; unknown values keep the default (info).
void init_log_level_from_env();

void log_at(LogLevel level, const char* fmt, ...);

#define SEGRA_LOG_ERROR(...) ::segra::log_at(::segra::LogLevel::Error, __VA_ARGS__)
#define SEGRA_LOG_INFO(...) ::segra::log_at(::segra::LogLevel::Info, __VA_ARGS__)
#define SEGRA_LOG_DEBUG(...) ::segra::log_at(::segra::LogLevel::Debug, __VA_ARGS__)

}  // namespace segra
