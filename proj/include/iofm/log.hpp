#pragma once

#include <string>

namespace iofm::log {

enum class Level { error = 0, info = 1, debug = 2 };

// Reads IOFM_LOG_LEVEL (error|info|debug) once; defaults to error.
Level level();

void write(Level lv, const std::string& msg);

inline void error(const std::string& msg) { write(Level::error, msg); }
inline void info(const std::string& msg) { write(Level::info, msg); }
inline void debug(const std::string& msg) { write(Level::debug, msg); }

} // namespace iofm::log
