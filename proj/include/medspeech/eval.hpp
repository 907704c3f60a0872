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

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "medspeech/corpus.hpp"
#include "medspeech/csv.hpp"
#include "medspeech/error.hpp"
#include "medspeech/io.hpp"
#include "medspeech/utf8.hpp"

namespace medspeech {

struct EditOps {
  std::uint64_t substitutions = 0;
  std::uint64_t deletions = 0;
  std::uint64_t insertions = 0;
  std::uint64_t ref_len = 0;

  std::uint64_t errors() const { return substitutions + deletions + insertions; }

  EditOps& operator+=(const EditOps& o) {
    substitutions += o.substitutions;
    deletions += o.deletions;
    insertions += o.insertions;
    ref_len += o.ref_len;
    return *this;
  }
  bool operator==(const EditOps&) const = default;
};

// Unit-cost Levenshtein. The backtrace prefers substitution (or match), then
// deletion, then insertion when several moves are optimal.
template <typename T>
EditOps edit_distance(std::span<const T> ref, std::span<const T> hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::uint32_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t sub = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({sub, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  EditOps ops;
  ops.ref_len = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        ops.substitutions += same ? 0 : 1;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++ops.deletions;
      --i;
    } else {
      ++ops.insertions;
      --j;
    }
  }
  return ops;
}

template <typename T>
EditOps edit_distance(const std::vector<T>& ref, const std::vector<T>& hyp) {
  return edit_distance(std::span<const T>(ref), std::span<const T>(hyp));
}

inline std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ') ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

struct TextPair {
  std::string ref;
  std::string hyp;
};

// Both sides are normalized before counting.
inline EditOps word_ops(const TextPair& p) {
  return edit_distance(split_words(normalize_transcript(p.ref)),
                       split_words(normalize_transcript(p.hyp)));
}

inline EditOps char_ops(const TextPair& p) {
  return edit_distance(utf8::chars(normalize_transcript(p.ref)),
                       utf8::chars(normalize_transcript(p.hyp)));
}

inline double error_rate(const EditOps& total) {
  if (total.ref_len == 0) {
    throw Error(ErrorKind::kInvalidArgument, "no reference tokens to score against");
  }
  return static_cast<double>(total.errors()) / static_cast<double>(total.ref_len);
}

// Micro-average: summed edit operations over summed reference lengths.
inline double wer(std::span<const TextPair> pairs) {
  EditOps total;
  for (const auto& p : pairs) total += word_ops(p);
  return error_rate(total);
}

inline double cer(std::span<const TextPair> pairs) {
  EditOps total;
  for (const auto& p : pairs) total += char_ops(p);
  return error_rate(total);
}

// ---------------------------------------------------------------------------
// Reports

struct GroupTally {
  std::string dataset_tag;
  std::size_t utterances = 0;
  EditOps words;
  EditOps chars;
};

struct ReportRow {
  std::string dataset_tag;
  std::size_t utterances = 0;
  std::optional<double> wer;  // ratios; empty when nothing to score
  std::optional<double> cer;
};

struct EvalReport {
  std::vector<ReportRow> rows;  // groups in input order, then "Overall"
};

inline constexpr std::string_view kOverallTag = "Overall";

inline GroupTally tally_group(std::string tag, std::span<const TextPair> pairs) {
  GroupTally g;
  g.dataset_tag = std::move(tag);
  g.utterances = pairs.size();
  for (const auto& p : pairs) {
    g.words += word_ops(p);
    g.chars += char_ops(p);
  }
  return g;
}

inline ReportRow row_from_tally(const std::string& tag, std::size_t utterances,
                                const EditOps& words, const EditOps& chars) {
  ReportRow r{tag, utterances, std::nullopt, std::nullopt};
  if (utterances > 0 && words.ref_len > 0) r.wer = error_rate(words);
  if (utterances > 0 && chars.ref_len > 0) r.cer = error_rate(chars);
  return r;
}

inline EvalReport build_report_from_tallies(std::span<const GroupTally> groups) {
  if (groups.empty()) throw Error(ErrorKind::kInvalidArgument, "report needs at least one group");
  EvalReport report;
  GroupTally overall;
  for (const auto& g : groups) {
    report.rows.push_back(row_from_tally(g.dataset_tag, g.utterances, g.words, g.chars));
    overall.utterances += g.utterances;
    overall.words += g.words;
    overall.chars += g.chars;
  }
  report.rows.push_back(row_from_tally(std::string(kOverallTag), overall.utterances,
                                       overall.words, overall.chars));
  return report;
}

using PairGroups = std::vector<std::pair<std::string, std::vector<TextPair>>>;

inline EvalReport build_report(const PairGroups& groups) {
  std::vector<GroupTally> tallies;
  tallies.reserve(groups.size());
  for (const auto& [tag, pairs] : groups) tallies.push_back(tally_group(tag, pairs));
  return build_report_from_tallies(tallies);
}

inline std::string format_percent(const std::optional<double>& ratio) {
  if (!ratio) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *ratio * 100.0);
  return buf;
}

inline std::string render_report_table(const EvalReport& report) {
  std::size_t tag_width = 7;  // "Dataset"
  for (const auto& r : report.rows) tag_width = std::max(tag_width, utf8::length(r.dataset_tag));
  auto pad = [](const std::string& s, std::size_t width) {
    const std::size_t len = utf8::length(s);
    return s + std::string(width > len ? width - len : 0, ' ');
  };
  auto line = [&](const std::string& tag, const std::string& n, const std::string& w,
                  const std::string& c) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %10s  %8s  %8s\n", n.c_str(), w.c_str(), c.c_str());
    return pad(tag, tag_width) + buf;
  };
  std::string out = line("Dataset", "Utterances", "WER (%)", "CER (%)");
  out += std::string(tag_width + 32, '-') + "\n";
  for (const auto& r : report.rows) {
    if (r.dataset_tag == kOverallTag) out += std::string(tag_width + 32, '-') + "\n";
    out += line(r.dataset_tag, std::to_string(r.utterances), format_percent(r.wer),
                format_percent(r.cer));
  }
  return out;
}

inline std::string render_report_csv(const EvalReport& report) {
  std::string out = csv::format_row({"dataset", "utterances", "wer", "cer"});
  for (const auto& r : report.rows) {
    out += csv::format_row({r.dataset_tag, std::to_string(r.utterances), format_percent(r.wer),
                            format_percent(r.cer)});
  }
  return out;
}

// Pairs file: CSV with header "ref,hyp".
inline std::vector<TextPair> parse_pairs(std::string_view text) {
  const auto records = csv::parse(text);
  if (records.empty() || records[0].fields != csv::Row{"ref", "hyp"}) {
    throw Error(ErrorKind::kSchema, "pairs file must start with header ref,hyp", 1);
  }
  std::vector<TextPair> out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].fields.size() != 2) {
      throw Error(ErrorKind::kSchema, "expected 2 fields", records[i].line);
    }
    if (!utf8::is_valid(records[i].fields[0]) || !utf8::is_valid(records[i].fields[1])) {
      throw Error(ErrorKind::kInvalidUtf8, "invalid UTF-8", records[i].line);
    }
    out.push_back({records[i].fields[0], records[i].fields[1]});
  }
  return out;
}

inline std::string format_pairs(std::span<const TextPair> pairs) {
  std::string out = csv::format_row({"ref", "hyp"});
  for (const auto& p : pairs) out += csv::format_row({p.ref, p.hyp});
  return out;
}

inline std::vector<TextPair> read_pairs(const std::filesystem::path& path) {
  try {
    return parse_pairs(io::read_file(path));
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
}

}  // namespace medspeech
