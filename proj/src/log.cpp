#include "advsim/log.hpp"

#include <cstdlib>
#include <memory>

#include <spdlog/sinks/stdout_sinks.h>

namespace advsim {

std::optional<LogLevel> parse_log_level(std::string_view text) {
  if (text == "error") return LogLevel::Error;
  if (text == "warn") return LogLevel::Warn;
  if (text == "info") return LogLevel::Info;
  if (text == "debug") return LogLevel::Debug;
  return std::nullopt;
}

spdlog::logger& log() {
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
    auto logger = std::make_shared<spdlog::logger>("advsim", sink);
    logger->set_pattern("advsim %l %v");
    logger->set_level(spdlog::level::warn);
    return logger;
  }();
  return *instance;
}

void set_log_level(LogLevel level) {
  switch (level) {
    case LogLevel::Error: log().set_level(spdlog::level::err); break;
    case LogLevel::Warn: log().set_level(spdlog::level::warn); break;
    case LogLevel::Info: log().set_level(spdlog::level::info); break;
    case LogLevel::Debug: log().set_level(spdlog::level::debug); break;
  }
}

bool apply_log_level_env() {
  const char* value = std::getenv("ADVSIM_LOG_LEVEL");
  if (value == nullptr) return false;
  auto level = parse_log_level(value);
  if (!level) return false;
  set_log_level(*level);
  return true;
}

}  // namespace advsim
