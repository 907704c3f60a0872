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

#include <unicode/utf8.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "medspeech/error.hpp"

// "Character" throughout the library means one Unicode code point, held as
// its UTF-8 byte string.

namespace medspeech::utf8 {

inline bool is_valid(std::string_view text) {
  const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

inline std::vector<char32_t> decode(std::string_view text) {
  const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) {
      throw Error(ErrorKind::kInvalidUtf8,
                  "invalid byte sequence at offset " + std::to_string(i));
    }
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

inline std::string encode(char32_t cp) {
  std::uint8_t buf[U8_MAX_LENGTH];
  std::int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) {
    throw Error(ErrorKind::kInvalidUtf8, "unencodable code point");
  }
  return std::string(reinterpret_cast<const char*>(buf),
                     static_cast<std::size_t>(n));
}

inline std::string encode(const std::vector<char32_t>& cps) {
  std::string out;
  for (char32_t c : cps) out += encode(c);
  return out;
}

// Splits into one UTF-8 string per code point.
inline std::vector<std::string> chars(std::string_view text) {
  std::vector<std::string> out;
  for (char32_t c : decode(text)) out.push_back(encode(c));
  return out;
}

inline std::size_t length(std::string_view text) {
  return decode(text).size();
}

}  // namespace medspeech::utf8
