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

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "medspeech/eval.hpp"
#include "medspeech/io.hpp"
#include "medspeech/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace medspeech {
namespace {

using Words = std::vector<std::string>;

EditOps ops(std::uint64_t s, std::uint64_t d, std::uint64_t i, std::uint64_t n) {
  EditOps o;
  o.substitutions = s;
  o.deletions = d;
  o.insertions = i;
  o.ref_len = n;
  return o;
}

TEST(EditDistance, HandExamples) {
  EXPECT_EQ(edit_distance(Words{"a", "b"}, Words{"a", "b"}), ops(0, 0, 0, 2));
  EXPECT_EQ(edit_distance(Words{"kitten", "sat", "here"}, Words{"sitting", "sat"}), ops(1, 1, 0, 3));
  EXPECT_EQ(edit_distance(Words{}, Words{"a", "b"}), ops(0, 0, 2, 0));
  EXPECT_EQ(edit_distance(Words{"a", "b"}, Words{}), ops(0, 2, 0, 2));
  // Tie between one substitution and deletion + insertion goes to substitution.
  EXPECT_EQ(edit_distance(Words{"a"}, Words{"b"}), ops(1, 0, 0, 1));
}

// Every pair of sequences over {0,1,2} with both lengths <= max_len.
template <typename Fn>
void for_all_pairs(std::size_t max_len, Fn fn) {
  const auto seqs = oracle::all_labels(3, max_len);
  for (const auto& a : seqs) {
    for (const auto& b : seqs) fn(a, b);
  }
}

TEST(EditDistance, MatchesRecursiveOracleExhaustively) {
  // Lengths <= 6 over three symbols: 1093^2 pairs.
  std::size_t checked = 0;
  for_all_pairs(6, [&](const std::vector<int>& a, const std::vector<int>& b) {
    const EditOps got = edit_distance(a, b);
    const oracle::Ops want = oracle::recursive_edit(a, b);
    ASSERT_EQ(got.substitutions, want.sub);
    ASSERT_EQ(got.deletions, want.del);
    ASSERT_EQ(got.insertions, want.ins);
    ASSERT_EQ(got.ref_len, a.size());
    ++checked;
  });
  EXPECT_EQ(checked, 1093u * 1093u);
}

TEST(EditDistance, IsAMetric) {
  const auto seqs = oracle::all_labels(3, 4);
  Rng rng(5);
  auto pick = [&]() -> const std::vector<int>& {
    return seqs[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(seqs.size()) - 1))];
  };
  for (int trial = 0; trial < 5000; ++trial) {
    const auto& a = pick();
    const auto& b = pick();
    const auto& c = pick();
    const auto ab = edit_distance(a, b).errors();
    ASSERT_EQ(ab, edit_distance(b, a).errors());
    ASSERT_LE(edit_distance(a, c).errors(), ab + edit_distance(b, c).errors());
    ASSERT_EQ(ab == 0, a == b);
    ASSERT_LE(edit_distance(a, b).substitutions + edit_distance(a, b).deletions, a.size());
  }
}

TEST(Wer, Examples) {
  const std::vector<TextPair> same = {{"জ্বর মাথা", "জ্বর মাথা"}, {"a", "a"}};
  EXPECT_EQ(wer(same), 0.0);
  EXPECT_EQ(cer(same), 0.0);
  const std::vector<TextPair> over = {{"a b", "x y z"}};
  EXPECT_EQ(wer(over), 1.5);
  const std::vector<TextPair> micro = {{"a", "b"}, {"a b c d e f g h i", "a b c d e f g h i"}};
  EXPECT_EQ(wer(micro), 0.1);
}

TEST(Wer, NormalizesBothSides) {
  const std::vector<TextPair> pairs = {{"আমার মাথা ব্যথা।", "আমার  মাথা, ব্যথা"}};
  EXPECT_EQ(wer(pairs), 0.0);
  EXPECT_EQ(cer(pairs), 0.0);
}

TEST(Wer, CerCountsSpaces) {
  const std::vector<TextPair> pairs = {{"ab c", "abc"}};
  EXPECT_DOUBLE_EQ(cer(pairs), 0.25);
}

TEST(Wer, EmptyReferenceIsAnError) {
  const std::vector<TextPair> empty = {{"", "a"}};
  EXPECT_ERROR_KIND(wer(empty), ErrorKind::kInvalidArgument);
  EXPECT_ERROR_KIND(wer(std::vector<TextPair>{}), ErrorKind::kInvalidArgument);
}

TEST(Wer, PropertiesOnRandomPairs) {
  const std::vector<std::string> words = {"জ্বর", "মাথা", "কাশি", "a", "b"};
  Rng rng(8);
  auto sentence = [&](int min_words) {
    std::string s;
    const auto n = rng.uniform_int(min_words, 6);
    for (int i = 0; i < n; ++i) {
      if (i) s += ' ';
      s += words[static_cast<std::size_t>(rng.uniform_int(0, 4))];
    }
    return s;
  };
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<TextPair> pairs(static_cast<std::size_t>(rng.uniform_int(1, 5)));
    std::size_t ref_words = 0, hyp_words = 0;
    for (auto& p : pairs) {
      p.ref = sentence(1);
      p.hyp = sentence(0);
      ref_words += split_words(p.ref).size();
      hyp_words += split_words(p.hyp).size();
    }
    const double w = wer(pairs);
    std::vector<TextPair> shuffled = pairs;
    rng.shuffle(shuffled);
    ASSERT_EQ(wer(shuffled), w);
    ASSERT_LE(w, static_cast<double>(ref_words + hyp_words) / static_cast<double>(ref_words));
    std::vector<TextPair> self;
    for (const auto& p : pairs) self.push_back({p.ref, p.ref});
    ASSERT_EQ(cer(self), 0.0);
  }
}

// Tallies chosen so the rows render as 7.83, 1.05, 14.89 and the micro
// average as 9.05.
std::vector<GroupTally> three_group_tallies() {
  return {
      {"Symptom Data", 1200, ops(500, 200, 83, 10000), ops(1500, 400, 200, 50000)},
      {"Synthetic Data", 300, ops(15, 4, 2, 2000), ops(30, 6, 4, 8000)},
      {"Sylhet Data", 640, ops(600, 80, 39, 4829), ops(1500, 200, 100, 24000)},
  };
}

TEST(Report, ThreeGroupShapeAndValues) {
  const auto tallies = three_group_tallies();
  const EvalReport report = build_report_from_tallies(tallies);
  ASSERT_EQ(report.rows.size(), 4u);
  EXPECT_EQ(report.rows[0].dataset_tag, "Symptom Data");
  EXPECT_EQ(report.rows[3].dataset_tag, "Overall");
  EXPECT_EQ(format_percent(report.rows[0].wer), "7.83");
  EXPECT_EQ(format_percent(report.rows[1].wer), "1.05");
  EXPECT_EQ(format_percent(report.rows[2].wer), "14.89");
  EXPECT_EQ(format_percent(report.rows[3].wer), "9.05");
  // Micro, not the 7.92 mean of the rows.
  EXPECT_DOUBLE_EQ(*report.rows[3].wer, 1523.0 / 16829.0);
  EXPECT_EQ(report.rows[3].utterances, 2140u);
}

TEST(Report, GoldenRenderings) {
  const EvalReport report = build_report_from_tallies(three_group_tallies());
  const std::filesystem::path golden = std::filesystem::path(MEDSPEECH_SOURCE_DIR) / "tests" / "golden";
  EXPECT_EQ(render_report_table(report), io::read_file(golden / "three_group_report.txt"));
  EXPECT_EQ(render_report_csv(report), io::read_file(golden / "three_group_report.csv"));
}

TEST(Report, SingleGroupOverallEqualsGroup) {
  const PairGroups groups = {{"standard", {{"a b c", "a x c"}, {"d", "d"}}}};
  const EvalReport r = build_report(groups);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].wer, r.rows[1].wer);
  EXPECT_EQ(r.rows[0].cer, r.rows[1].cer);
  EXPECT_DOUBLE_EQ(*r.rows[1].wer, 0.25);
}

TEST(Report, EmptyGroupHasBlankMetrics) {
  const PairGroups groups = {{"standard", {{"a", "a"}}}, {"sylheti", {}}};
  const EvalReport r = build_report(groups);
  EXPECT_EQ(r.rows[1].utterances, 0u);
  EXPECT_FALSE(r.rows[1].wer.has_value());
  EXPECT_FALSE(r.rows[1].cer.has_value());
  EXPECT_NE(render_report_csv(r).find("sylheti,0,,\n"), std::string::npos);
  EXPECT_ERROR_KIND(build_report(PairGroups{}), ErrorKind::kInvalidArgument);
}

TEST(Report, TableAlignsUnicodeTags) {
  const PairGroups groups = {{"সিলেট", {{"a", "b"}}}, {"x", {{"a", "a"}}}};
  const std::string table = render_report_table(build_report(groups));
  // Every line has the same number of code points. The tag's vowel signs
  // are spacing marks, one column each.
  std::size_t width = 0;
  std::size_t start = 0;
  while (start < table.size()) {
    const std::size_t end = table.find('\n', start);
    const std::size_t len = oracle::utf8_chars(table.substr(start, end - start)).size();
    if (width == 0) width = len;
    EXPECT_EQ(len, width);
    start = end + 1;
  }
}

TEST(Pairs, ParseFormatAndErrors) {
  const std::vector<TextPair> pairs = {{"a, b", "c"}, {"জ্বর", ""}};
  const std::string text = format_pairs(pairs);
  const auto back = parse_pairs(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].ref, "a, b");
  EXPECT_EQ(back[1].hyp, "");
  EXPECT_ERROR_KIND(parse_pairs("reference,hyp\n"), ErrorKind::kSchema);
  try {
    parse_pairs("ref,hyp\na,b\nc\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSchema);
    EXPECT_EQ(e.line(), 3u);
  }
}

}  // namespace
}  // namespace medspeech
