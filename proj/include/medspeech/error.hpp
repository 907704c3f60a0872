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

#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace medspeech {

enum class ErrorKind {
  kFileNotFound,
  kIo,
  kMalformedFile,
  kUnsupportedEncoding,
  kInvalidArgument,
  kInvalidUtf8,
  kParse,
  kSchema,
  kIncompatible,
  kInvariant,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFileNotFound: return "file not found";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kMalformedFile: return "malformed file";
    case ErrorKind::kUnsupportedEncoding: return "unsupported encoding";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kInvalidUtf8: return "invalid utf-8";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kSchema: return "schema error";
    case ErrorKind::kIncompatible: return "incompatible inputs";
    case ErrorKind::kInvariant: return "invariant violation";
  }
  return "error";
}

// Every failure raised by the library is an Error carrying a kind, so callers
// (the CLI in particular) can map failures to exit codes without string
// matching. Parse errors additionally carry a 1-based line number, 0 if n/a.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::size_t line = 0)
      : std::runtime_error(format(kind, message, line)),
        kind_(kind),
        line_(line) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(ErrorKind kind, const std::string& message,
                            std::size_t line) {
    std::ostringstream os;
    os << to_string(kind);
    if (line > 0) os << " at line " << line;
    os << ": " << message;
    return os.str();
  }

  ErrorKind kind_;
  std::size_t line_;
};

// Re-raises `e` with extra context prepended, keeping its kind. The line
// number survives inside the message text.
[[noreturn]] inline void rethrow_with_context(const Error& e,
                                              const std::string& context) {
  throw Error(e.kind(), context + ": " + e.what(), 0);
}

}  // namespace medspeech
