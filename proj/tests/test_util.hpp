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

#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "medspeech/error.hpp"

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "medspeech-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << bytes;
}

inline void le16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}
inline void le32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// Hand-assembled canonical WAV, independent of the library writer.
inline std::string wav_bytes(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                             std::uint16_t bits, const std::string& payload) {
  std::string s = "RIFF";
  le32(s, static_cast<std::uint32_t>(36 + payload.size()));
  s += "WAVEfmt ";
  le32(s, 16);
  le16(s, format);
  le16(s, channels);
  le32(s, rate);
  le32(s, rate * channels * bits / 8);
  le16(s, static_cast<std::uint16_t>(channels * bits / 8));
  le16(s, bits);
  s += "data";
  le32(s, static_cast<std::uint32_t>(payload.size()));
  return s + payload;
}

inline std::string pcm16_payload(const std::vector<std::int16_t>& v) {
  std::string s;
  for (auto x : v) le16(s, static_cast<std::uint16_t>(x));
  return s;
}

inline std::string f32_payload(const std::vector<float>& v) {
  std::string s;
  for (float x : v) {
    std::uint32_t u;
    std::memcpy(&u, &x, 4);
    le32(s, u);
  }
  return s;
}

}  // namespace testutil

// Asserts that `stmt` throws medspeech::Error of the given kind.
#define EXPECT_ERROR_KIND(stmt, expected_kind)                                 \
  do {                                                                         \
    try {                                                                      \
      stmt;                                                                    \
      ADD_FAILURE() << "no exception from " #stmt;                             \
    } catch (const medspeech::Error& e) {                                      \
      EXPECT_EQ(e.kind(), expected_kind) << e.what();                          \
    }                                                                          \
  } while (0)
