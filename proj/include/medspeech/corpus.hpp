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

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "medspeech/csv.hpp"
#include "medspeech/error.hpp"
#include "medspeech/io.hpp"
#include "medspeech/rng.hpp"
#include "medspeech/utf8.hpp"

namespace medspeech {

// ---------------------------------------------------------------------------
// Transcript normalization

namespace corpus_detail {

inline std::u32string nfc(const std::u32string& text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorKind::kInvariant, "ICU NFC normalizer unavailable");
  }
  icu::UnicodeString input = icu::UnicodeString::fromUTF32(
      reinterpret_cast<const UChar32*>(text.data()),
      static_cast<std::int32_t>(text.size()));
  icu::UnicodeString output = normalizer->normalize(input, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorKind::kInvariant, "NFC normalization failed");
  }
  std::u32string out;
  for (std::int32_t i = 0; i < output.length();) {
    const UChar32 c = output.char32At(i);
    out.push_back(static_cast<char32_t>(c));
    i += U16_LENGTH(c);
  }
  return out;
}

inline bool is_punctuation(char32_t c) {
  return (U_GET_GC_MASK(static_cast<UChar32>(c)) & U_GC_P_MASK) != 0;
}

inline bool is_space(char32_t c) {
  return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0;
}

}  // namespace corpus_detail

// NFC, drop general category P, collapse whitespace runs to one space, trim.
// Dropping a punctuation mark can leave a composable sequence, so NFC and
// filtering are repeated until the text stops changing; this is what makes
// the function idempotent.
inline std::string normalize_transcript(std::string_view text) {
  const auto cps = utf8::decode(text);
  std::u32string current(cps.begin(), cps.end());
  for (int round = 0; round < 8; ++round) {
    std::u32string composed = corpus_detail::nfc(current);
    std::u32string filtered;
    filtered.reserve(composed.size());
    for (char32_t c : composed) {
      if (!corpus_detail::is_punctuation(c)) filtered.push_back(c);
    }
    const bool stable = filtered == current;
    current = std::move(filtered);
    if (stable) break;
  }
  std::u32string collapsed;
  bool pending_space = false;
  for (char32_t c : current) {
    if (corpus_detail::is_space(c)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed.push_back(U' ');
    pending_space = false;
    collapsed.push_back(c);
  }
  return utf8::encode(std::vector<char32_t>(collapsed.begin(), collapsed.end()));
}

// ---------------------------------------------------------------------------
// Alphabet

// Ordered label set. Position i is CTC label i; blank is not a member.
class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> chars) : chars_(std::move(chars)) {
    for (std::size_t i = 0; i < chars_.size(); ++i) {
      if (utf8::length(chars_[i]) != 1) {
        throw Error(ErrorKind::kInvalidArgument,
                    "alphabet entry is not a single character: '" + chars_[i] + "'");
      }
      if (!index_.emplace(chars_[i], static_cast<int>(i)).second) {
        throw Error(ErrorKind::kInvalidArgument,
                    "duplicate alphabet entry '" + chars_[i] + "'");
      }
    }
  }

  std::size_t size() const { return chars_.size(); }
  bool empty() const { return chars_.empty(); }
  const std::string& at(std::size_t i) const { return chars_.at(i); }
  const std::vector<std::string>& chars() const { return chars_; }

  std::optional<int> index_of(std::string_view ch) const {
    auto it = index_.find(std::string(ch));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view ch) const { return index_of(ch).has_value(); }

  // Maps text to label indices; throws if a character is not a member.
  std::vector<int> encode(std::string_view text) const {
    std::vector<int> labels;
    for (const auto& ch : utf8::chars(text)) {
      auto idx = index_of(ch);
      if (!idx) {
        throw Error(ErrorKind::kInvalidArgument,
                    "character '" + ch + "' is not in the alphabet");
      }
      labels.push_back(*idx);
    }
    return labels;
  }

  std::string decode(std::span<const int> labels) const {
    std::string out;
    for (int l : labels) out += chars_.at(static_cast<std::size_t>(l));
    return out;
  }

  bool operator==(const Alphabet& other) const { return chars_ == other.chars_; }

 private:
  std::vector<std::string> chars_;
  std::unordered_map<std::string, int> index_;
};

inline Alphabet build_alphabet(const std::vector<std::string>& transcripts) {
  if (transcripts.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no transcripts");
  }
  std::set<char32_t> seen;
  for (const auto& t : transcripts) {
    for (char32_t c : utf8::decode(t)) seen.insert(c);
  }
  std::vector<std::string> chars;
  chars.reserve(seen.size());
  for (char32_t c : seen) chars.push_back(utf8::encode(c));
  return Alphabet(std::move(chars));
}

// alphabets.csv: one character per line, no header, '#' starts a comment
// line, a line holding a single space is the space character. Blank lines
// are ignored.
inline std::string format_alphabet(const Alphabet& alphabet) {
  std::string out = "# one character per line; a line with a single space is the space character\n";
  for (const auto& ch : alphabet.chars()) {
    out += ch;
    out += '\n';
  }
  return out;
}

inline Alphabet parse_alphabet(std::string_view text) {
  if (!utf8::is_valid(text)) {
    throw Error(ErrorKind::kInvalidUtf8, "alphabet file is not valid UTF-8");
  }
  std::vector<std::string> chars;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (utf8::length(line) != 1) {
      throw Error(ErrorKind::kParse,
                  "expected exactly one character, got '" + std::string(line) + "'",
                  line_no);
    }
    chars.emplace_back(line);
    if (end == text.size()) break;
  }
  try {
    return Alphabet(std::move(chars));
  } catch (const Error& e) {
    throw Error(ErrorKind::kParse, e.what());
  }
}

inline void write_alphabet(const Alphabet& alphabet,
                           const std::filesystem::path& path) {
  io::write_file(path, format_alphabet(alphabet));
}

inline Alphabet read_alphabet(const std::filesystem::path& path) {
  return parse_alphabet(io::read_file(path));
}

// ---------------------------------------------------------------------------
// Manifest

struct ManifestEntry {
  std::string wav_filename;
  std::uint64_t wav_filesize = 0;
  std::string transcript;
  std::string dataset_tag;

  bool operator==(const ManifestEntry&) const = default;
};

inline constexpr std::array<std::string_view, 4> kManifestColumns = {
    "wav_filename", "wav_filesize", "transcript", "dataset_tag"};

inline std::string format_manifest(const std::vector<ManifestEntry>& entries) {
  std::string out = csv::format_row(
      {std::string(kManifestColumns[0]), std::string(kManifestColumns[1]),
       std::string(kManifestColumns[2]), std::string(kManifestColumns[3])});
  for (const auto& e : entries) {
    if (!utf8::is_valid(e.transcript) || !utf8::is_valid(e.wav_filename) ||
        !utf8::is_valid(e.dataset_tag)) {
      throw Error(ErrorKind::kInvalidUtf8, "manifest entry " + e.wav_filename);
    }
    out += csv::format_row({e.wav_filename, std::to_string(e.wav_filesize),
                            e.transcript, e.dataset_tag});
  }
  return out;
}

inline std::vector<ManifestEntry> parse_manifest(std::string_view text) {
  if (!utf8::is_valid(text)) {
    throw Error(ErrorKind::kInvalidUtf8, "manifest is not valid UTF-8");
  }
  const auto records = csv::parse(text);
  if (records.empty()) throw Error(ErrorKind::kSchema, "manifest has no header");
  const auto& header = records.front().fields;
  for (std::size_t i = 0; i < kManifestColumns.size(); ++i) {
    if (i >= header.size() || header[i] != kManifestColumns[i]) {
      throw Error(ErrorKind::kSchema,
                  "expected column '" + std::string(kManifestColumns[i]) +
                      "' at position " + std::to_string(i + 1) + ", found '" +
                      (i < header.size() ? header[i] : std::string()) + "'",
                  1);
    }
  }
  if (header.size() != kManifestColumns.size()) {
    throw Error(ErrorKind::kSchema, "unexpected column '" +
                                        header[kManifestColumns.size()] + "'",
                1);
  }
  std::vector<ManifestEntry> entries;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != kManifestColumns.size()) {
      throw Error(ErrorKind::kParse,
                  "expected 4 columns, found " + std::to_string(rec.fields.size()),
                  rec.line);
    }
    ManifestEntry e;
    e.wav_filename = rec.fields[0];
    const auto& size_field = rec.fields[1];
    auto [ptr, ec] = std::from_chars(size_field.data(),
                                     size_field.data() + size_field.size(),
                                     e.wav_filesize);
    if (ec != std::errc() || ptr != size_field.data() + size_field.size()) {
      throw Error(ErrorKind::kParse, "wav_filesize '" + size_field + "' is not an integer",
                  rec.line);
    }
    e.transcript = rec.fields[2];
    e.dataset_tag = rec.fields[3];
    entries.push_back(std::move(e));
  }
  return entries;
}

inline void write_manifest(const std::vector<ManifestEntry>& entries,
                           const std::filesystem::path& path) {
  io::write_file(path, format_manifest(entries));
}

inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  try {
    return parse_manifest(io::read_file(path));
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
}

// ---------------------------------------------------------------------------
// Splitting

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct ManifestSplit {
  std::vector<ManifestEntry> train, dev, test;
};

// Seeded shuffle, then contiguous partition. dev and test get
// floor(n * ratio) entries; the remainder goes to train. A partition with a
// positive ratio that would come out empty takes one entry from train.
inline ManifestSplit split_manifest(std::vector<ManifestEntry> entries,
                                    const SplitRatios& ratios,
                                    std::uint64_t seed) {
  const std::array<double, 3> r = {ratios.train, ratios.dev, ratios.test};
  for (double x : r) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorKind::kInvalidArgument, "split ratios must be non-negative");
    }
  }
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) {
    throw Error(ErrorKind::kInvalidArgument, "split ratios must sum to 1");
  }
  const std::size_t positive =
      static_cast<std::size_t>(std::count_if(r.begin(), r.end(), [](double x) { return x > 0; }));
  const std::size_t n = entries.size();
  if (n < positive) {
    throw Error(ErrorKind::kInvalidArgument,
                std::to_string(n) + " entries cannot fill " +
                    std::to_string(positive) + " non-empty partitions");
  }

  Rng rng(seed);
  rng.shuffle(entries);

  auto floor_share = [n](double ratio) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio + 1e-9));
  };
  std::size_t n_dev = floor_share(r[1]);
  std::size_t n_test = floor_share(r[2]);
  if (r[1] > 0 && n_dev == 0) n_dev = 1;
  if (r[2] > 0 && n_test == 0) n_test = 1;
  std::size_t n_train = n - n_dev - n_test;
  if (r[0] > 0 && n_train == 0) {
    // Only reachable when rounding starved train; give it one back.
    if (n_dev > 1) --n_dev; else --n_test;
    n_train = 1;
  }

  ManifestSplit out;
  auto first = entries.begin();
  out.train.assign(first, first + static_cast<std::ptrdiff_t>(n_train));
  first += static_cast<std::ptrdiff_t>(n_train);
  out.dev.assign(first, first + static_cast<std::ptrdiff_t>(n_dev));
  first += static_cast<std::ptrdiff_t>(n_dev);
  out.test.assign(first, entries.end());
  return out;
}

}  // namespace medspeech
