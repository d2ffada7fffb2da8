#pragma once

#include <optional>
#include <string_view>

#include <spdlog/spdlog.h>

namespace advsim {

enum class LogLevel { Error, Warn, Info, Debug };

std::optional<LogLevel> parse_log_level(std::string_view text);

// Process-wide diagnostic log on stderr, one line per record:
//   advsim <level> <message>
spdlog::logger& log();

void set_log_level(LogLevel level);

// Applies ADVSIM_LOG_LEVEL when set; returns true when the variable won.
bool apply_log_level_env();

}  // namespace advsim
