#pragma once

#include <cstdlib>
#include <iostream>
#include <string_view>

namespace stratree::cli {

enum class LogLevel { error = 0, info = 1, debug = 2 };

inline LogLevel log_level() {
  const char* env = std::getenv("STRATREE_LOG");
  if (env == nullptr) return LogLevel::error;
  const std::string_view v(env);
  if (v == "debug") return LogLevel::debug;
  if (v == "info") return LogLevel::info;
  return LogLevel::error;
}

inline void log(LogLevel level, std::ostream& err, std::string_view message) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  static constexpr std::string_view names[] = {"error", "info", "debug"};
  err << "[stratree " << names[static_cast<int>(level)] << "] " << message << '\n';
}

}  // namespace stratree::cli
