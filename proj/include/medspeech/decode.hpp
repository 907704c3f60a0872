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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "medspeech/corpus.hpp"
#include "medspeech/error.hpp"
#include "medspeech/io.hpp"
#include "medspeech/lm.hpp"
#include "medspeech/utf8.hpp"

namespace medspeech {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kDefaultAlpha = 0.75;
inline constexpr double kDefaultBeta = 1.85;

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// ---------------------------------------------------------------------------
// LogitMatrix

// T x C natural-log probabilities, row-major by frame. Classes 0..C-2 are
// alphabet positions; C-1 is the CTC blank.
class LogitMatrix {
 public:
  static constexpr double kNormTolerance = 1e-4;
  static constexpr double kRenormTolerance = 1e-2;

  LogitMatrix() = default;

  // Validates per-frame normalization: frames within 1e-4 of 1 are kept,
  // frames within 1e-2 are renormalized, anything else is rejected.
  template <typename T>
  static LogitMatrix from_log_probs(std::size_t frames, std::size_t classes,
                                    std::span<const T> values) {
    if (classes < 2) throw Error(ErrorKind::kInvalidArgument, "logit matrix needs C >= 2");
    if (values.size() != frames * classes) {
      throw Error(ErrorKind::kInvalidArgument,
                  "logit buffer holds " + std::to_string(values.size()) + " values, expected " +
                      std::to_string(frames * classes));
    }
    LogitMatrix m;
    m.frames_ = frames;
    m.classes_ = classes;
    m.values_.assign(values.begin(), values.end());
    for (std::size_t t = 0; t < frames; ++t) {
      double norm = kNegInf;
      for (std::size_t c = 0; c < classes; ++c) {
        const double v = m.values_[t * classes + c];
        if (std::isnan(v) || v > 1e-6) {
          throw Error(ErrorKind::kInvalidArgument,
                      "frame " + std::to_string(t) + " holds an invalid log-probability");
        }
        norm = log_add(norm, v);
      }
      const double mass = std::exp(norm);
      if (std::abs(mass - 1.0) <= kNormTolerance) continue;
      if (std::abs(mass - 1.0) > kRenormTolerance) {
        throw Error(ErrorKind::kInvalidArgument,
                    "frame " + std::to_string(t) + " probabilities sum to " + std::to_string(mass));
      }
      for (std::size_t c = 0; c < classes; ++c) m.values_[t * classes + c] -= norm;
    }
    return m;
  }

  static LogitMatrix from_log_probs(std::size_t frames, std::size_t classes,
                                    const std::vector<double>& values) {
    return from_log_probs<double>(frames, classes, std::span<const double>(values));
  }

  // Convenience for fixtures: takes linear probabilities.
  static LogitMatrix from_probs(std::size_t frames, std::size_t classes,
                                const std::vector<double>& probs) {
    std::vector<double> logs(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) logs[i] = std::log(probs[i]);
    return from_log_probs(frames, classes, logs);
  }

  std::size_t frames() const { return frames_; }
  std::size_t classes() const { return classes_; }
  int blank() const { return static_cast<int>(classes_) - 1; }
  double at(std::size_t t, std::size_t c) const { return values_[t * classes_ + c]; }
  std::span<const double> frame(std::size_t t) const {
    return std::span<const double>(values_).subspan(t * classes_, classes_);
  }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t frames_ = 0;
  std::size_t classes_ = 0;
  std::vector<double> values_;
};

// Binary layout: "CTCL", u32 version = 1, u32 T, u32 C, then T*C
// little-endian f32, frame by frame.
inline std::string encode_logits(const LogitMatrix& m) {
  std::string out = "CTCL";
  auto put_u32 = [&out](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  put_u32(1);
  put_u32(static_cast<std::uint32_t>(m.frames()));
  put_u32(static_cast<std::uint32_t>(m.classes()));
  for (double v : m.values()) {
    const auto f = static_cast<float>(v);
    std::uint32_t u;
    std::memcpy(&u, &f, sizeof u);
    put_u32(u);
  }
  return out;
}

inline LogitMatrix decode_logits(std::string_view bytes) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(bytes.data());
  if (bytes.size() < 16 || std::memcmp(p, "CTCL", 4) != 0) {
    throw Error(ErrorKind::kMalformedFile, "missing CTCL magic");
  }
  auto u32 = [p](std::size_t off) {
    return static_cast<std::uint32_t>(p[off]) | (static_cast<std::uint32_t>(p[off + 1]) << 8) |
           (static_cast<std::uint32_t>(p[off + 2]) << 16) |
           (static_cast<std::uint32_t>(p[off + 3]) << 24);
  };
  if (u32(4) != 1) {
    throw Error(ErrorKind::kMalformedFile, "unsupported CTCL version " + std::to_string(u32(4)));
  }
  const std::size_t frames = u32(8);
  const std::size_t classes = u32(12);
  if (classes != 0 && (bytes.size() - 16) / 4 / classes < frames) {
    throw Error(ErrorKind::kMalformedFile, "CTCL payload shorter than header declares");
  }
  if (bytes.size() != 16 + 4 * frames * classes) {
    throw Error(ErrorKind::kMalformedFile, "CTCL payload size does not match header");
  }
  std::vector<float> values(frames * classes);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint32_t u = u32(16 + 4 * i);
    std::memcpy(&values[i], &u, sizeof(float));
  }
  return LogitMatrix::from_log_probs<float>(frames, classes, values);
}

inline void write_logits(const LogitMatrix& m, const std::filesystem::path& path) {
  io::write_file(path, encode_logits(m));
}

inline LogitMatrix read_logits(const std::filesystem::path& path) {
  try {
    return decode_logits(io::read_file(path));
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
}

inline void check_alphabet(const LogitMatrix& logits, const Alphabet& alphabet) {
  if (logits.classes() != alphabet.size() + 1) {
    throw Error(ErrorKind::kIncompatible,
                "logit matrix has " + std::to_string(logits.classes()) +
                    " classes but alphabet has " + std::to_string(alphabet.size()) +
                    " characters plus blank");
  }
}

// ---------------------------------------------------------------------------
// Greedy decoding and CTC label probability

// Per-frame argmax (ties to the lowest index), collapse repeats, drop blanks.
inline std::string greedy_decode(const LogitMatrix& logits, const Alphabet& alphabet) {
  check_alphabet(logits, alphabet);
  std::string out;
  int previous = -1;
  for (std::size_t t = 0; t < logits.frames(); ++t) {
    const auto row = logits.frame(t);
    const auto best = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    if (best != previous && best != logits.blank()) out += alphabet.at(static_cast<std::size_t>(best));
    previous = best;
  }
  return out;
}

// log of the summed probability of every alignment collapsing to `label`,
// via the forward recursion over the blank-interleaved label. Infeasible
// labels return -inf.
inline double ctc_label_logprob(const LogitMatrix& logits, std::span<const int> label) {
  const int blank = logits.blank();
  for (int l : label) {
    if (l < 0 || l >= blank) throw Error(ErrorKind::kInvalidArgument, "label index out of range");
  }
  const std::size_t T = logits.frames();
  std::size_t required = label.size();
  for (std::size_t i = 1; i < label.size(); ++i) required += label[i] == label[i - 1];
  if (required > T) return kNegInf;
  if (T == 0) return 0.0;  // empty label, empty input

  const std::size_t S = 2 * label.size() + 1;
  auto ext = [&](std::size_t s) { return s % 2 == 0 ? blank : label[s / 2]; };
  std::vector<double> alpha(S, kNegInf), next(S);
  alpha[0] = logits.at(0, static_cast<std::size_t>(blank));
  if (S > 1) alpha[1] = logits.at(0, static_cast<std::size_t>(label[0]));
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = alpha[s];
      if (s >= 1) acc = log_add(acc, alpha[s - 1]);
      if (s >= 2 && ext(s) != blank && ext(s) != ext(s - 2)) acc = log_add(acc, alpha[s - 2]);
      next[s] = acc == kNegInf ? kNegInf : acc + logits.at(t, static_cast<std::size_t>(ext(s)));
    }
    std::swap(alpha, next);
  }
  return S > 1 ? log_add(alpha[S - 1], alpha[S - 2]) : alpha[0];
}

// ---------------------------------------------------------------------------
// Shallow fusion

struct Hypothesis {
  std::string text;
  double log_score = kNegInf;
  double acoustic_logp = kNegInf;
  double lm_logp = 0.0;  // natural log
  int length_bonus_count = 0;
};

struct FusionComponents {
  double lm_logp = 0.0;
  int count = 0;
};

// Whole-string LM contribution: per character in char mode, per non-empty
// space-delimited word in word mode, with <s> priming and no </s>.
inline FusionComponents fusion_components(const NGramModel& lm, std::string_view text) {
  FusionComponents out;
  std::vector<NGramModel::TokenId> history = {lm.bos_id()};
  for (const auto& token : tokenize(text, lm.token_mode())) {
    const auto id = lm.id(token);
    out.lm_logp += std::numbers::ln10 * lm.score(id, history);
    ++out.count;
    history.push_back(id);
  }
  return out;
}

// Fails when the LM cannot be used with this alphabet: a char-mode LM must
// consist of single characters, and some LM token must be spellable.
inline void check_lm_compatibility(const NGramModel& lm, const Alphabet& alphabet) {
  bool any_spellable = false;
  for (const auto& tok : lm.vocabulary()) {
    if (tok == kBos || tok == kEos || tok == kUnk) continue;
    const auto chars = utf8::chars(tok);
    if (lm.token_mode() == TokenMode::kChar && chars.size() != 1) {
      throw Error(ErrorKind::kIncompatible,
                  "char-mode LM holds multi-character token '" + tok + "'");
    }
    bool spellable = !chars.empty();
    for (const auto& ch : chars) spellable = spellable && alphabet.contains(ch);
    any_spellable = any_spellable || spellable;
  }
  if (!any_spellable) {
    throw Error(ErrorKind::kIncompatible, "no LM token can be spelled with the alphabet");
  }
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

inline constexpr std::size_t kBruteForceLimit = 1'000'000;

// Scores every label string of length <= max_label_len. Ties go to the
// lexicographically smallest text.
inline Hypothesis brute_force_decode(const LogitMatrix& logits, const Alphabet& alphabet,
                                     std::size_t max_label_len, const NGramModel* lm = nullptr,
                                     double alpha = kDefaultAlpha, double beta = kDefaultBeta) {
  check_alphabet(logits, alphabet);
  const std::size_t symbols = alphabet.size();
  std::size_t candidates = 1, layer = 1;
  for (std::size_t len = 1; len <= max_label_len; ++len) {
    if (symbols != 0 && layer > kBruteForceLimit / symbols) {
      throw Error(ErrorKind::kInvalidArgument, "brute force enumeration exceeds 10^6 candidates");
    }
    layer *= symbols;
    candidates += layer;
    if (candidates > kBruteForceLimit) {
      throw Error(ErrorKind::kInvalidArgument, "brute force enumeration exceeds 10^6 candidates");
    }
  }

  Hypothesis best;
  std::vector<int> label;
  auto consider = [&] {
    Hypothesis h;
    h.text = alphabet.decode(label);
    h.acoustic_logp = ctc_label_logprob(logits, label);
    h.log_score = h.acoustic_logp;
    if (lm != nullptr) {
      const auto fc = fusion_components(*lm, h.text);
      h.lm_logp = fc.lm_logp;
      h.length_bonus_count = fc.count;
      h.log_score += alpha * fc.lm_logp + beta * fc.count;
    }
    if (h.log_score > best.log_score ||
        (h.log_score == best.log_score && h.text < best.text)) {
      best = std::move(h);
    }
  };
  // Depth-first over all strings, shortest first within each branch.
  auto recurse = [&](auto& self) -> void {
    consider();
    if (label.size() == max_label_len) return;
    for (std::size_t c = 0; c < symbols; ++c) {
      label.push_back(static_cast<int>(c));
      self(self);
      label.pop_back();
    }
  };
  recurse(recurse);
  return best;
}

// ---------------------------------------------------------------------------
// Prefix beam search

namespace decode_detail {

struct PrefixNode {
  int parent = -1;
  int label = -1;  // last character; -1 for the empty prefix
  std::string text;
  double lm_logp = 0.0;
  int count = 0;
  std::vector<NGramModel::TokenId> history;  // LM context, at most order-1 ids
  std::string partial_word;                  // word mode: unscored trailing word
  std::unordered_map<int, int> children;
};

struct PrefixTree {
  const Alphabet* alphabet = nullptr;
  const NGramModel* lm = nullptr;
  std::vector<PrefixNode> nodes;

  explicit PrefixTree(const Alphabet& a, const NGramModel* model) : alphabet(&a), lm(model) {
    PrefixNode root;
    if (lm != nullptr) root.history = {lm->bos_id()};
    nodes.push_back(std::move(root));
  }

  void push_history(PrefixNode& node, NGramModel::TokenId id) const {
    node.history.push_back(id);
    const auto keep = static_cast<std::size_t>(std::max(lm->order() - 1, 0));
    if (node.history.size() > keep) {
      node.history.erase(node.history.begin(),
                         node.history.end() - static_cast<std::ptrdiff_t>(keep));
    }
  }

  void score_unit(PrefixNode& node, const std::string& unit) const {
    const auto id = lm->id(unit);
    node.lm_logp += std::numbers::ln10 * lm->score(id, node.history);
    node.count += 1;
    push_history(node, id);
  }

  int child(int parent, int label) {
    auto it = nodes[static_cast<std::size_t>(parent)].children.find(label);
    if (it != nodes[static_cast<std::size_t>(parent)].children.end()) return it->second;
    PrefixNode node;
    {
      const PrefixNode& p = nodes[static_cast<std::size_t>(parent)];
      node.parent = parent;
      node.label = label;
      node.text = p.text + alphabet->at(static_cast<std::size_t>(label));
      node.lm_logp = p.lm_logp;
      node.count = p.count;
      node.history = p.history;
      node.partial_word = p.partial_word;
    }
    if (lm != nullptr) {
      const std::string& ch = alphabet->at(static_cast<std::size_t>(label));
      if (lm->token_mode() == TokenMode::kChar) {
        score_unit(node, ch);
      } else if (ch == " ") {
        if (!node.partial_word.empty()) {
          score_unit(node, node.partial_word);
          node.partial_word.clear();
        }
      } else {
        node.partial_word += ch;
      }
    }
    const int id = static_cast<int>(nodes.size());
    nodes[static_cast<std::size_t>(parent)].children.emplace(label, id);
    nodes.push_back(std::move(node));
    return id;
  }

  // LM terms including the trailing word scored once at end of sequence.
  FusionComponents final_components(int id) const {
    const PrefixNode& node = nodes[static_cast<std::size_t>(id)];
    FusionComponents fc{node.lm_logp, node.count};
    if (lm != nullptr && lm->token_mode() == TokenMode::kWord && !node.partial_word.empty()) {
      fc.lm_logp += std::numbers::ln10 * lm->score(lm->id(node.partial_word), node.history);
      fc.count += 1;
    }
    return fc;
  }
};

struct BeamEntry {
  int node = 0;
  double p_blank = kNegInf;
  double p_nonblank = kNegInf;
  double score = kNegInf;
};

}  // namespace decode_detail

// CTC prefix beam search with optional shallow fusion. Prefixes are merged by
// collapsed text; each frame keeps the beam_width best prefixes by
// acoustic + alpha * lm + beta * units (ties: smaller text first). Returns the
// final beam ranked the same way.
inline std::vector<Hypothesis> beam_search(const LogitMatrix& logits, const Alphabet& alphabet,
                                           std::size_t beam_width, const NGramModel* lm = nullptr,
                                           double alpha = kDefaultAlpha,
                                           double beta = kDefaultBeta) {
  using decode_detail::BeamEntry;
  if (beam_width == 0) throw Error(ErrorKind::kInvalidArgument, "beam width must be >= 1");
  check_alphabet(logits, alphabet);
  if (lm != nullptr) check_lm_compatibility(*lm, alphabet);

  decode_detail::PrefixTree tree(alphabet, lm);
  const auto blank = static_cast<std::size_t>(logits.blank());
  const int symbols = static_cast<int>(alphabet.size());

  auto fused = [&](int node, double acoustic) {
    if (lm == nullptr) return acoustic;
    const auto& n = tree.nodes[static_cast<std::size_t>(node)];
    return acoustic + alpha * n.lm_logp + beta * n.count;
  };
  auto ranked_before = [&](const BeamEntry& a, const BeamEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return tree.nodes[static_cast<std::size_t>(a.node)].text <
           tree.nodes[static_cast<std::size_t>(b.node)].text;
  };

  std::vector<BeamEntry> beam = {{0, 0.0, kNegInf, 0.0}};
  std::unordered_map<int, std::size_t> slot;
  std::vector<BeamEntry> next;
  for (std::size_t t = 0; t < logits.frames(); ++t) {
    const auto row = logits.frame(t);
    slot.clear();
    next.clear();
    auto entry = [&](int node) -> BeamEntry& {
      auto [it, inserted] = slot.emplace(node, next.size());
      if (inserted) next.push_back({node, kNegInf, kNegInf, kNegInf});
      return next[it->second];
    };
    for (const BeamEntry& e : beam) {
      const double total = log_add(e.p_blank, e.p_nonblank);
      {
        BeamEntry& same = entry(e.node);
        same.p_blank = log_add(same.p_blank, total + row[blank]);
      }
      const int last = tree.nodes[static_cast<std::size_t>(e.node)].label;
      if (last >= 0 && row[static_cast<std::size_t>(last)] != kNegInf) {
        BeamEntry& same = entry(e.node);
        same.p_nonblank =
            log_add(same.p_nonblank, e.p_nonblank + row[static_cast<std::size_t>(last)]);
      }
      for (int c = 0; c < symbols; ++c) {
        const double p = row[static_cast<std::size_t>(c)];
        if (p == kNegInf) continue;
        const double base = c == last ? e.p_blank : total;
        if (base == kNegInf) continue;
        const int child = tree.child(e.node, c);
        BeamEntry& ext = entry(child);
        ext.p_nonblank = log_add(ext.p_nonblank, base + p);
      }
    }
    std::erase_if(next, [](const BeamEntry& e) {
      return log_add(e.p_blank, e.p_nonblank) == kNegInf;
    });
    for (BeamEntry& e : next) e.score = fused(e.node, log_add(e.p_blank, e.p_nonblank));
    if (next.size() > beam_width) {
      std::partial_sort(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(beam_width),
                        next.end(), ranked_before);
      next.resize(beam_width);
    }
    std::swap(beam, next);
  }

  std::vector<Hypothesis> out;
  out.reserve(beam.size());
  for (const BeamEntry& e : beam) {
    Hypothesis h;
    h.text = tree.nodes[static_cast<std::size_t>(e.node)].text;
    h.acoustic_logp = log_add(e.p_blank, e.p_nonblank);
    h.log_score = h.acoustic_logp;
    if (lm != nullptr) {
      const auto fc = tree.final_components(e.node);
      h.lm_logp = fc.lm_logp;
      h.length_bonus_count = fc.count;
      h.log_score += alpha * fc.lm_logp + beta * fc.count;
    }
    out.push_back(std::move(h));
  }
  std::sort(out.begin(), out.end(), [](const Hypothesis& a, const Hypothesis& b) {
    if (a.log_score != b.log_score) return a.log_score > b.log_score;
    return a.text < b.text;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Reusable decoder bundle

struct DecoderOptions {
  std::size_t beam_width = 128;
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;
};

// Immutable (alphabet, optional LM, weights) bundle. Compatibility is checked
// once at construction; decode calls share no mutable state and may run
// concurrently.
class Decoder {
 public:
  Decoder(Alphabet alphabet, std::shared_ptr<const NGramModel> lm, DecoderOptions options = {})
      : alphabet_(std::move(alphabet)), lm_(std::move(lm)), options_(options) {
    if (options_.beam_width == 0) throw Error(ErrorKind::kInvalidArgument, "beam width must be >= 1");
    if (lm_) check_lm_compatibility(*lm_, alphabet_);
  }

  const Alphabet& alphabet() const { return alphabet_; }
  const NGramModel* lm() const { return lm_.get(); }
  const DecoderOptions& options() const { return options_; }
  std::size_t classes() const { return alphabet_.size() + 1; }

  std::vector<Hypothesis> decode(const LogitMatrix& logits) const {
    return beam_search(logits, alphabet_, options_.beam_width, lm_.get(), options_.alpha,
                       options_.beta);
  }

  // Row-major T x C log-probabilities from a host buffer (float or double).
  template <typename T>
  Hypothesis decode_best(std::span<const T> values, std::size_t frames,
                         std::size_t classes) const {
    if (classes != this->classes()) {
      throw Error(ErrorKind::kIncompatible, "expected " + std::to_string(this->classes()) +
                                                " classes, got " + std::to_string(classes));
    }
    const auto hyps = decode(LogitMatrix::from_log_probs<T>(frames, classes, values));
    return hyps.empty() ? Hypothesis{} : hyps.front();
  }

 private:
  Alphabet alphabet_;
  std::shared_ptr<const NGramModel> lm_;
  DecoderOptions options_;
};

}  // namespace medspeech
