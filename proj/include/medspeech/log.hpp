// Copyright 2026 The medspeech Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>

// Minimal leveled logger writing to stderr. The threshold comes from the
// MEDSPEECH_LOG environment variable (error, warn, info, debug); default warn.

namespace medspeech::log {

enum class Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

inline Level level_from_env() {
  const char* env = std::getenv("MEDSPEECH_LOG");
  if (env == nullptr) return Level::kWarn;
  std::string_view v(env);
  if (v == "error") return Level::kError;
  if (v == "info") return Level::kInfo;
  if (v == "debug") return Level::kDebug;
  return Level::kWarn;
}

inline std::atomic<int>& threshold() {
  static std::atomic<int> value{static_cast<int>(level_from_env())};
  return value;
}

inline void set_level(Level level) {
  threshold().store(static_cast<int>(level));
}

inline bool enabled(Level level) {
  return static_cast<int>(level) <= threshold().load();
}

// Count of warnings emitted by this process; tests use it to observe
// "skip with warning" paths.
inline std::atomic<long>& warning_count() {
  static std::atomic<long> count{0};
  return count;
}

inline void write(Level level, std::string_view message) {
  if (level == Level::kWarn) ++warning_count();
  if (!enabled(level)) return;
  static std::mutex mu;
  static constexpr std::string_view kNames[] = {"ERROR", "WARN", "INFO",
                                                "DEBUG"};
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "medspeech " << kNames[static_cast<int>(level)] << ": "
            << message << '\n';
}

template <typename... Args>
void emit(Level level, Args&&... args) {
  if (level != Level::kWarn && !enabled(level)) return;
  std::ostringstream os;
  (os << ... << std::forward<Args>(args));
  write(level, os.str());
}

template <typename... Args>
void error(Args&&... args) { emit(Level::kError, std::forward<Args>(args)...); }
template <typename... Args>
void warn(Args&&... args) { emit(Level::kWarn, std::forward<Args>(args)...); }
template <typename... Args>
void info(Args&&... args) { emit(Level::kInfo, std::forward<Args>(args)...); }
template <typename... Args>
void debug(Args&&... args) { emit(Level::kDebug, std::forward<Args>(args)...); }

}  // namespace medspeech::log
