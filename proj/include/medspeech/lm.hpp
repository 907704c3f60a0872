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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "medspeech/error.hpp"
#include "medspeech/io.hpp"
#include "medspeech/log.hpp"
#include "medspeech/utf8.hpp"

namespace medspeech {

enum class TokenMode { kWord, kChar };

inline std::string_view to_string(TokenMode mode) {
  return mode == TokenMode::kChar ? "char" : "word";
}

inline TokenMode token_mode_from_string(std::string_view s) {
  if (s == "word") return TokenMode::kWord;
  if (s == "char") return TokenMode::kChar;
  throw Error(ErrorKind::kInvalidArgument, "token mode must be 'word' or 'char', got '" +
                                               std::string(s) + "'");
}

inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr std::string_view kUnk = "<unk>";
// ARPA fields are whitespace separated, so a char-mode space token is written
// under this name.
inline constexpr std::string_view kArpaSpace = "<sp>";
inline constexpr double kLog10Zero = -99.0;

// Word mode splits on single spaces (input is whitespace-normalized); char
// mode yields one token per code point, space included.
inline std::vector<std::string> tokenize(std::string_view text, TokenMode mode) {
  if (mode == TokenMode::kChar) return utf8::chars(text);
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find(' ', pos), text.size());
    if (end > pos) out.emplace_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// ARPA document

struct ArpaRecord {
  double log10_prob = 0.0;
  std::vector<std::string> tokens;
  std::optional<double> log10_backoff;
};

struct ArpaDocument {
  std::vector<std::size_t> counts;             // header, index 0 = unigrams
  std::vector<std::vector<ArpaRecord>> orders;  // records per order
  std::optional<TokenMode> token_mode;         // from the preamble, if present
};

namespace arpa_detail {

inline std::string_view trim(std::string_view s) {
  const auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || first == s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

inline std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.7g", v);
  return buf;
}

}  // namespace arpa_detail

inline ArpaDocument parse_arpa(std::string_view text) {
  using namespace arpa_detail;
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  auto fail = [](const std::string& msg, std::size_t line) -> void {
    throw Error(ErrorKind::kParse, msg, line);
  };

  ArpaDocument doc;
  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line == "\\data\\") break;
    if (line.find("token_mode=char") != std::string_view::npos) doc.token_mode = TokenMode::kChar;
    if (line.find("token_mode=word") != std::string_view::npos) doc.token_mode = TokenMode::kWord;
  }
  if (i == lines.size()) fail("missing \\data\\ section", lines.size() + 1);
  ++i;

  // Header counts.
  for (; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) {
      if (!doc.counts.empty()) break;
      continue;
    }
    if (line.front() == '\\') break;
    if (line.substr(0, 6) != "ngram ") fail("expected 'ngram N=count'", i + 1);
    const auto body = trim(line.substr(6));
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) fail("expected 'ngram N=count'", i + 1);
    std::size_t n = 0, count = 0;
    const auto ns = trim(body.substr(0, eq));
    const auto cs = trim(body.substr(eq + 1));
    auto r1 = std::from_chars(ns.data(), ns.data() + ns.size(), n);
    auto r2 = std::from_chars(cs.data(), cs.data() + cs.size(), count);
    if (r1.ec != std::errc() || r1.ptr != ns.data() + ns.size() || r2.ec != std::errc() ||
        r2.ptr != cs.data() + cs.size()) {
      fail("non-numeric ngram count", i + 1);
    }
    if (n != doc.counts.size() + 1) fail("n-gram orders must be contiguous from 1", i + 1);
    doc.counts.push_back(count);
  }
  if (doc.counts.empty()) fail("no ngram counts in \\data\\ section", i + 1);

  doc.orders.resize(doc.counts.size());
  for (std::size_t n = 1; n <= doc.counts.size(); ++n) {
    while (i < lines.size() && trim(lines[i]).empty()) ++i;
    const std::string expected = "\\" + std::to_string(n) + "-grams:";
    if (i >= lines.size() || trim(lines[i]) != expected) {
      fail("missing " + expected + " section", std::min(i, lines.size()) + 1);
    }
    const std::size_t section_line = i + 1;
    ++i;
    auto& records = doc.orders[n - 1];
    for (; i < lines.size(); ++i) {
      const auto line = trim(lines[i]);
      if (line.empty()) continue;
      if (line.front() == '\\') break;
      const auto fields = split_ws(line);
      if (fields.size() != n + 1 && fields.size() != n + 2) {
        fail("expected " + std::to_string(n) + " tokens with a probability and optional backoff",
             i + 1);
      }
      ArpaRecord rec;
      const auto prob = parse_double(fields[0]);
      if (!prob) fail("non-numeric probability '" + std::string(fields[0]) + "'", i + 1);
      rec.log10_prob = *prob;
      for (std::size_t k = 1; k <= n; ++k) {
        if (!utf8::is_valid(fields[k])) fail("token is not valid UTF-8", i + 1);
        rec.tokens.emplace_back(fields[k]);
      }
      if (fields.size() == n + 2) {
        const auto bo = parse_double(fields[n + 1]);
        if (!bo) fail("non-numeric backoff '" + std::string(fields[n + 1]) + "'", i + 1);
        rec.log10_backoff = *bo;
      }
      records.push_back(std::move(rec));
    }
    if (records.size() != doc.counts[n - 1]) {
      fail("header declares " + std::to_string(doc.counts[n - 1]) + " " + std::to_string(n) +
               "-grams but section has " + std::to_string(records.size()),
           section_line);
    }
  }
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i >= lines.size() || trim(lines[i]) != "\\end\\") {
    fail("missing \\end\\ marker", std::min(i, lines.size()) + 1);
  }
  return doc;
}

// Probabilities and backoffs are printed with 7 significant digits; zero
// backoffs are omitted.
inline std::string format_arpa(const ArpaDocument& doc) {
  std::string out;
  if (doc.token_mode) {
    out += "# medspeech token_mode=";
    out += to_string(*doc.token_mode);
    out += "\n\n";
  }
  out += "\\data\\\n";
  for (std::size_t n = 0; n < doc.orders.size(); ++n) {
    out += "ngram " + std::to_string(n + 1) + "=" + std::to_string(doc.orders[n].size()) + "\n";
  }
  for (std::size_t n = 0; n < doc.orders.size(); ++n) {
    out += "\n\\" + std::to_string(n + 1) + "-grams:\n";
    for (const auto& rec : doc.orders[n]) {
      out += arpa_detail::format_value(rec.log10_prob);
      out += '\t';
      for (std::size_t k = 0; k < rec.tokens.size(); ++k) {
        if (k > 0) out += ' ';
        out += rec.tokens[k];
      }
      if (rec.log10_backoff && *rec.log10_backoff != 0.0) {
        out += '\t';
        out += arpa_detail::format_value(*rec.log10_backoff);
      }
      out += '\n';
    }
  }
  out += "\n\\end\\\n";
  return out;
}

// ---------------------------------------------------------------------------
// Back-off model

class NGramModel {
 public:
  using TokenId = std::int32_t;

  NGramModel() = default;

  // Builds a model from parsed ARPA records. In char mode the "<sp>" token
  // stands for the space character.
  static NGramModel from_arpa(const ArpaDocument& doc, TokenMode mode) {
    if (doc.orders.empty()) throw Error(ErrorKind::kParse, "ARPA document has no n-grams");
    NGramModel m;
    m.order_ = static_cast<int>(doc.orders.size());
    m.mode_ = mode;
    m.nodes_.emplace_back();
    m.records_.resize(doc.orders.size());
    for (const auto& rec : doc.orders[0]) {
      const std::string tok = m.from_arpa_token(rec.tokens.at(0));
      if (m.ids_.count(tok)) {
        throw Error(ErrorKind::kParse, "duplicate unigram '" + rec.tokens[0] + "'");
      }
      m.ids_.emplace(tok, static_cast<TokenId>(m.vocab_.size()));
      m.vocab_.push_back(tok);
    }
    for (std::size_t n = 0; n < doc.orders.size(); ++n) {
      for (const auto& rec : doc.orders[n]) {
        std::vector<TokenId> ids;
        for (const auto& t : rec.tokens) {
          auto it = m.ids_.find(m.from_arpa_token(t));
          if (it == m.ids_.end()) {
            throw Error(ErrorKind::kParse, "token '" + t + "' in " + std::to_string(n + 1) +
                                               "-gram is missing from the unigrams");
          }
          ids.push_back(it->second);
        }
        m.insert(ids, rec.log10_prob, rec.log10_backoff.value_or(0.0));
      }
    }
    m.resolve_sentinels();
    return m;
  }

  ArpaDocument to_arpa() const {
    ArpaDocument doc;
    doc.token_mode = mode_;
    doc.orders.resize(records_.size());
    for (std::size_t n = 0; n < records_.size(); ++n) {
      for (const auto& r : records_[n]) {
        ArpaRecord rec;
        rec.log10_prob = r.log10_prob;
        for (TokenId id : r.ids) rec.tokens.push_back(to_arpa_token(vocab_[static_cast<std::size_t>(id)]));
        if (r.log10_backoff != 0.0 && static_cast<int>(n) + 1 < order_) {
          rec.log10_backoff = r.log10_backoff;
        }
        doc.orders[n].push_back(std::move(rec));
      }
      doc.counts.push_back(doc.orders[n].size());
    }
    return doc;
  }

  int order() const { return order_; }
  TokenMode token_mode() const { return mode_; }
  const std::vector<std::string>& vocabulary() const { return vocab_; }
  std::size_t ngram_count(int n) const { return records_.at(static_cast<std::size_t>(n - 1)).size(); }

  std::optional<TokenId> find(std::string_view token) const {
    auto it = ids_.find(std::string(token));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  // OOV tokens map to <unk> (or -1 when the model has no <unk>).
  TokenId id(std::string_view token) const { return find(token).value_or(unk_); }
  TokenId bos_id() const { return bos_; }
  TokenId eos_id() const { return eos_; }
  TokenId unk_id() const { return unk_; }

  // Every token that can be predicted, i.e. the vocabulary without <s>.
  std::vector<TokenId> predictable() const {
    std::vector<TokenId> out;
    for (TokenId i = 0; i < static_cast<TokenId>(vocab_.size()); ++i) {
      if (i != bos_) out.push_back(i);
    }
    return out;
  }

  // log10 P(token | context) with standard back-off. Only the last order-1
  // context tokens are used.
  double score(TokenId token, std::span<const TokenId> context) const {
    if (token < 0) return kLog10Zero;
    const std::size_t max_ctx = static_cast<std::size_t>(order_ - 1);
    if (context.size() > max_ctx) context = context.subspan(context.size() - max_ctx);
    std::uint32_t chain[kMaxOrder];
    std::size_t depth = 0;
    chain[depth] = 0;
    for (std::size_t k = context.size(); k-- > 0;) {
      const Node& node = nodes_[chain[depth]];
      auto it = node.children.find(context[k]);
      if (it == node.children.end()) break;
      chain[++depth] = it->second;
    }
    double backoff = 0.0;
    for (std::size_t d = depth + 1; d-- > 0;) {
      const Node& node = nodes_[chain[d]];
      auto it = node.probs.find(token);
      if (it != node.probs.end()) return backoff + it->second;
      backoff += node.backoff;
    }
    return kLog10Zero;
  }

  double score_token(std::string_view token, const std::vector<std::string>& context) const {
    std::vector<TokenId> ctx;
    ctx.reserve(context.size());
    for (const auto& t : context) ctx.push_back(id(t));
    return score(id(token), ctx);
  }

  static constexpr std::size_t kMaxOrder = 16;

 private:
  struct Node {
    double backoff = 0.0;
    std::unordered_map<TokenId, double> probs;
    std::unordered_map<TokenId, std::uint32_t> children;
  };
  struct Record {
    std::vector<TokenId> ids;
    double log10_prob;
    double log10_backoff;
  };

  friend NGramModel train_lm(const std::vector<std::string>&, int, TokenMode,
                             std::optional<double>);

  std::string from_arpa_token(const std::string& t) const {
    return mode_ == TokenMode::kChar && t == kArpaSpace ? std::string(" ") : t;
  }
  std::string to_arpa_token(const std::string& t) const {
    return mode_ == TokenMode::kChar && t == " " ? std::string(kArpaSpace) : t;
  }

  // Walks (creating as needed) the node for the reversed token path.
  std::uint32_t node_for(std::span<const TokenId> tokens) {
    std::uint32_t cur = 0;
    for (std::size_t k = tokens.size(); k-- > 0;) {
      auto it = nodes_[cur].children.find(tokens[k]);
      if (it != nodes_[cur].children.end()) {
        cur = it->second;
        continue;
      }
      const auto next = static_cast<std::uint32_t>(nodes_.size());
      nodes_[cur].children.emplace(tokens[k], next);
      nodes_.emplace_back();
      cur = next;
    }
    return cur;
  }

  void insert(std::span<const TokenId> ids, double log10_prob, double log10_backoff) {
    if (ids.empty() || ids.size() > kMaxOrder) {
      throw Error(ErrorKind::kParse, "unsupported n-gram order");
    }
    const std::uint32_t ctx = node_for(ids.first(ids.size() - 1));
    if (!nodes_[ctx].probs.emplace(ids.back(), log10_prob).second) {
      throw Error(ErrorKind::kParse, "duplicate n-gram");
    }
    if (log10_backoff != 0.0) nodes_[node_for(ids)].backoff = log10_backoff;
    records_[ids.size() - 1].push_back({std::vector<TokenId>(ids.begin(), ids.end()),
                                        log10_prob, log10_backoff});
  }

  void resolve_sentinels() {
    bos_ = find(kBos).value_or(-1);
    eos_ = find(kEos).value_or(-1);
    unk_ = find(kUnk).value_or(-1);
  }

  int order_ = 0;
  TokenMode mode_ = TokenMode::kWord;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, TokenId> ids_;
  std::vector<Node> nodes_;  // nodes_[0] is the empty context
  std::vector<std::vector<Record>> records_;
  TokenId bos_ = -1, eos_ = -1, unk_ = -1;
};

// ---------------------------------------------------------------------------
// Training: interpolated Kneser-Ney, one discount per order.

// Discount D = n1 / (n1 + 2 n2) from count-of-counts at one order. Falls
// back to 0.5 when either count is zero, since D would be 0 or 1 and leave
// zero-probability tokens.
inline double kn_discount(std::size_t n1, std::size_t n2, int order) {
  if (n1 == 0 || n2 == 0) {
    log::warn("lm: cannot estimate discount at order ", order, " (n1=", n1, ", n2=", n2,
              "); using 0.5");
    return 0.5;
  }
  return static_cast<double>(n1) / (static_cast<double>(n1) + 2.0 * static_cast<double>(n2));
}

// Highest order uses raw counts; lower orders use continuation counts
// (number of distinct left extensions) except for n-grams starting with
// <s>, which keep raw counts. Unigram discount mass goes to <unk>.
inline NGramModel train_lm(const std::vector<std::string>& transcripts, int order,
                           TokenMode mode, std::optional<double> discount_override = {}) {
  using TokenId = NGramModel::TokenId;
  using Gram = std::vector<TokenId>;
  if (order < 1 || static_cast<std::size_t>(order) > NGramModel::kMaxOrder) {
    throw Error(ErrorKind::kInvalidArgument, "order must be in [1, 16]");
  }
  if (discount_override && !(*discount_override > 0.0 && *discount_override < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "discount override must lie in (0, 1)");
  }
  std::vector<std::vector<std::string>> sentences;
  bool any_token = false;
  for (const auto& t : transcripts) {
    sentences.push_back(tokenize(t, mode));
    any_token = any_token || !sentences.back().empty();
  }
  if (!any_token) throw Error(ErrorKind::kInvalidArgument, "training corpus has no tokens");

  NGramModel m;
  m.order_ = order;
  m.mode_ = mode;
  m.nodes_.emplace_back();
  m.records_.resize(static_cast<std::size_t>(order));
  for (std::string_view s : {kUnk, kBos, kEos}) {
    m.ids_.emplace(std::string(s), static_cast<TokenId>(m.vocab_.size()));
    m.vocab_.emplace_back(s);
  }
  {
    std::map<std::string, int> words;
    for (const auto& s : sentences) {
      for (const auto& w : s) words.emplace(w, 0);
    }
    for (const auto& [w, unused] : words) {
      if (m.ids_.count(w)) continue;
      m.ids_.emplace(w, static_cast<TokenId>(m.vocab_.size()));
      m.vocab_.push_back(w);
    }
  }
  m.resolve_sentinels();
  const TokenId bos = m.bos_, unk = m.unk_;

  // Raw counts per order. N-grams never start before the single <s>.
  const auto N = static_cast<std::size_t>(order);
  std::vector<std::map<Gram, std::size_t>> raw(N);
  for (const auto& s : sentences) {
    Gram ids = {bos};
    for (const auto& w : s) ids.push_back(m.ids_.at(w));
    ids.push_back(m.eos_);
    for (std::size_t end = 1; end < ids.size(); ++end) {
      for (std::size_t n = 1; n <= N && n <= end + 1; ++n) {
        raw[n - 1][Gram(ids.begin() + static_cast<std::ptrdiff_t>(end + 1 - n),
                        ids.begin() + static_cast<std::ptrdiff_t>(end + 1))]++;
      }
    }
  }

  // Adjusted counts.
  std::vector<std::map<Gram, std::size_t>> adjusted(N);
  adjusted[N - 1] = raw[N - 1];
  for (std::size_t n = N - 1; n >= 1; --n) {
    std::map<Gram, std::size_t> continuation;
    for (const auto& [g, c] : raw[n]) continuation[Gram(g.begin() + 1, g.end())]++;
    for (const auto& [g, c] : raw[n - 1]) {
      if (g.front() == bos) {
        adjusted[n - 1][g] = c;
      } else {
        auto it = continuation.find(g);
        adjusted[n - 1][g] = it == continuation.end() ? c : it->second;
      }
    }
  }
  adjusted[0].erase(Gram{bos});

  std::vector<double> discount(N);
  for (std::size_t n = 0; n < N; ++n) {
    std::size_t n1 = 0, n2 = 0;
    for (const auto& [g, c] : adjusted[n]) {
      n1 += c == 1;
      n2 += c == 2;
    }
    discount[n] = discount_override ? *discount_override
                                    : kn_discount(n1, n2, static_cast<int>(n + 1));
  }

  // Per-context totals and type counts at each order.
  struct ContextStats {
    double total = 0.0;
    std::size_t types = 0;
  };
  std::vector<std::map<Gram, ContextStats>> ctx(N);
  for (std::size_t n = 0; n < N; ++n) {
    for (const auto& [g, c] : adjusted[n]) {
      auto& st = ctx[n][Gram(g.begin(), g.end() - 1)];
      st.total += static_cast<double>(c);
      st.types += 1;
    }
  }
  auto gamma = [&](std::size_t n, const Gram& context) {
    const auto& st = ctx[n].at(context);
    return discount[n] * static_cast<double>(st.types) / st.total;
  };

  // Interpolated probabilities, lowest order first.
  std::vector<std::map<Gram, double>> prob(N);
  {
    const double g0 = gamma(0, Gram{});
    for (const auto& [g, c] : adjusted[0]) {
      prob[0][g] = std::max(static_cast<double>(c) - discount[0], 0.0) / ctx[0].at(Gram{}).total;
    }
    prob[0][Gram{unk}] += g0;
  }
  for (std::size_t n = 1; n < N; ++n) {
    for (const auto& [g, c] : adjusted[n]) {
      const Gram context(g.begin(), g.end() - 1);
      const double lower = prob[n - 1].at(Gram(g.begin() + 1, g.end()));
      prob[n][g] = (static_cast<double>(c) - discount[n]) / ctx[n].at(context).total +
                   gamma(n, context) * lower;
    }
  }

  // Emit records: <s> first as a -99 unigram, then everything in map order.
  auto backoff_of = [&](const Gram& g) {
    if (g.size() >= N) return 0.0;
    auto it = ctx[g.size()].find(g);
    return it == ctx[g.size()].end() ? 0.0 : std::log10(gamma(g.size(), g));
  };
  m.insert(Gram{bos}, kLog10Zero, backoff_of(Gram{bos}));
  for (std::size_t n = 0; n < N; ++n) {
    for (const auto& [g, p] : prob[n]) m.insert(g, std::log10(p), backoff_of(g));
  }
  return m;
}

// Sum of log10 scores of `tokens` after <s>, without </s>.
inline double prefix_logprob(const NGramModel& model, std::span<const std::string> tokens) {
  std::vector<NGramModel::TokenId> history = {model.bos_id()};
  double total = 0.0;
  for (const auto& t : tokens) {
    const auto id = model.id(t);
    total += model.score(id, history);
    history.push_back(id);
  }
  return total;
}

// Sum of log10 scores with <s> priming and </s> termination.
inline double sequence_logprob(const NGramModel& model, std::span<const std::string> tokens) {
  std::vector<NGramModel::TokenId> history = {model.bos_id()};
  double total = 0.0;
  for (const auto& t : tokens) {
    const auto id = model.id(t);
    total += model.score(id, history);
    history.push_back(id);
  }
  return total + model.score(model.eos_id(), history);
}

inline double sentence_logprob(const NGramModel& model, std::string_view text) {
  const auto tokens = tokenize(text, model.token_mode());
  return sequence_logprob(model, tokens);
}

// 10^(-sum(log10 P) / tokens), counting one </s> per transcript.
inline double perplexity(const NGramModel& model, const std::vector<std::string>& transcripts) {
  if (transcripts.empty()) throw Error(ErrorKind::kInvalidArgument, "empty evaluation corpus");
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& t : transcripts) {
    const auto tokens = tokenize(t, model.token_mode());
    total += sequence_logprob(model, tokens);
    count += tokens.size() + 1;
  }
  return std::pow(10.0, -total / static_cast<double>(count));
}

inline void write_arpa(const NGramModel& model, const std::filesystem::path& path) {
  io::write_file(path, format_arpa(model.to_arpa()));
}

// Token mode comes from `mode` when given, else from the file preamble, else
// word mode.
inline NGramModel read_arpa(const std::filesystem::path& path,
                            std::optional<TokenMode> mode = std::nullopt) {
  try {
    const ArpaDocument doc = parse_arpa(io::read_file(path));
    return NGramModel::from_arpa(doc, mode.value_or(doc.token_mode.value_or(TokenMode::kWord)));
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
}

}  // namespace medspeech
