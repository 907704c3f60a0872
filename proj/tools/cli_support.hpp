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

// Helpers shared by the medspeech subcommands: JSON config lookup, manifest
// path handling, exit codes.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "medspeech/medspeech.hpp"

namespace medspeech::cli {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kInternalError = 3 };

// Pipeline config file. Keys are the JSON pointers listed in kConfigKeys;
// anything else is rejected. Relative paths resolve against the file's
// directory. Command-line flags override config values.
class Config {
 public:
  Config() = default;

  static Config load(const fs::path& path) {
    Config c;
    c.dir_ = path.parent_path();
    try {
      c.doc_ = json::parse(io::read_file(path));
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
    }
    if (!c.doc_.is_object()) throw Error(ErrorKind::kSchema, "config must be a JSON object");
    c.check_keys(c.doc_, "");
    return c;
  }

  bool loaded() const { return !doc_.is_null(); }

  template <typename T>
  std::optional<T> get(const std::string& pointer) const {
    if (!loaded()) return std::nullopt;
    const json::json_pointer ptr(pointer);
    if (!doc_.contains(ptr)) return std::nullopt;
    try {
      return doc_.at(ptr).get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorKind::kSchema, "config value " + pointer + " has the wrong type");
    }
  }

  std::optional<fs::path> path(const std::string& pointer) const {
    auto s = get<std::string>(pointer);
    if (!s) return std::nullopt;
    fs::path p(*s);
    return p.is_relative() ? dir_ / p : p;
  }

  // Fills `value` from the config unless the flag was given explicitly.
  template <typename T>
  void fill(const CLI::Option* flag, T& value, const std::string& pointer) const {
    if (flag != nullptr && flag->count() > 0) return;
    if (auto v = get<T>(pointer)) value = *v;
  }

  void fill_path(const CLI::Option* flag, fs::path& value, const std::string& pointer) const {
    if (flag != nullptr && flag->count() > 0) return;
    if (auto v = path(pointer)) value = *v;
  }

 private:
  void check_keys(const json& node, const std::string& prefix) const {
    static const std::set<std::string> kSections = {"/lm", "/decode", "/split", "/synth"};
    static const std::set<std::string> kKeys = {
        "/input_dir",       "/work_dir",      "/sample_rate",     "/augment_config",
        "/noise_dir",       "/seed",          "/jobs",            "/lm/order",
        "/lm/mode",         "/lm/discount",   "/decode/beam",     "/decode/alpha",
        "/decode/beta",     "/split/train",   "/split/dev",       "/split/test",
        "/synth/confidence", "/synth/frames_per_char", "/synth/blank_gap_frames",
        "/synth/noise"};
    for (const auto& [key, value] : node.items()) {
      const std::string ptr = prefix + "/" + key;
      if (kSections.count(ptr) != 0) {
        if (!value.is_object()) throw Error(ErrorKind::kSchema, "config " + ptr + " must be an object");
        check_keys(value, ptr);
      } else if (kKeys.count(ptr) == 0) {
        throw Error(ErrorKind::kSchema, "unknown config key " + ptr);
      }
    }
  }

  json doc_;
  fs::path dir_;
};

// Absolute wav path for a manifest entry; manifest paths are relative to the
// manifest's directory.
inline fs::path entry_path(const fs::path& manifest, const ManifestEntry& e) {
  const fs::path p(e.wav_filename);
  return p.is_relative() ? manifest.parent_path() / p : p;
}

inline std::string relative_to(const fs::path& target, const fs::path& base_dir) {
  const fs::path t = fs::absolute(target).lexically_normal();
  const fs::path b = fs::absolute(base_dir.empty() ? fs::path(".") : base_dir).lexically_normal();
  return t.lexically_relative(b).generic_string();
}

// Re-expresses entries of `manifest` relative to `new_dir`.
inline std::vector<ManifestEntry> rebase(std::vector<ManifestEntry> entries,
                                         const fs::path& manifest, const fs::path& new_dir) {
  for (auto& e : entries) e.wav_filename = relative_to(entry_path(manifest, e), new_dir);
  return entries;
}

inline void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// Writes to `out` when given, else to stdout.
inline void emit(const std::string& text, const fs::path& out) {
  if (out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    ensure_parent(out);
    io::write_file(out, text);
  }
}

inline TokenMode parse_mode(const std::string& s) {
  try {
    return token_mode_from_string(s);
  } catch (const Error&) {
    throw CLI::ValidationError("--mode", "must be 'char' or 'word'");
  }
}

inline std::vector<std::string> read_lines(const fs::path& path) {
  const std::string text = io::read_file(path);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = end + 1;
  }
  return lines;
}

inline std::vector<fs::path> list_wavs(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::kFileNotFound, dir.string() + " is not a directory");
  }
  std::vector<fs::path> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return a.generic_string() < b.generic_string();
  });
  return out;
}

inline fs::path with_extension(fs::path p, const std::string& ext) {
  p.replace_extension(ext);
  return p;
}

}  // namespace medspeech::cli
