#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace pimu_cli::logging {

enum class level { debug = 0, info = 1, warn = 2, error = 3 };

/// Threshold comes from the PIMU_LOG environment variable (debug, info,
/// warn, error); unset or unknown values mean info.
inline level threshold() {
    static const level cached = [] {
        const char* env = std::getenv("PIMU_LOG");
        const std::string_view v = env ? env : "";
        if (v == "debug") return level::debug;
        if (v == "warn") return level::warn;
        if (v == "error") return level::error;
        return level::info;
    }();
    return cached;
}

inline void log(level l, const std::string& msg) {
    if (l < threshold()) return;
    static constexpr const char* names[] = {"debug", "info", "warn", "error"};
    std::cerr << "pimu [" << names[static_cast<int>(l)] << "] " << msg << '\n';
}

inline void debug(const std::string& msg) { log(level::debug, msg); }
inline void info(const std::string& msg) { log(level::info, msg); }
inline void warn(const std::string& msg) { log(level::warn, msg); }
inline void error(const std::string& msg) { log(level::error, msg); }

}  // namespace pimu_cli::logging
