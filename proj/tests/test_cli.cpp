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

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include <gtest/gtest.h>

#include "medspeech/medspeech.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace medspeech {
namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI inside `dir` with stdout/stderr captured to files.
CliRun cli(const testutil::TempDir& dir, const std::string& args) {
  const std::string out = (dir / ".stdout").string();
  const std::string err = (dir / ".stderr").string();
  const std::string cmd = "cd '" + dir.path().string() + "' && '" MEDSPEECH_CLI "' " + args + " >'" +
                          out + "' 2>'" + err + "'";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = oracle::slurp(out);
  r.err = oracle::slurp(err);
  std::filesystem::remove(out);
  std::filesystem::remove(err);
  return r;
}

TEST(Cli, UsageErrorsExitOne) {
  testutil::TempDir dir;
  CliRun r = cli(dir, "");
  EXPECT_EQ(r.code, 1);
  r = cli(dir, "bogus");
  EXPECT_EQ(r.code, 1);
  r = cli(dir, "stats --manifest m.csv --no-such-flag");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  r = cli(dir, "--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("pipeline"), std::string::npos);
}

TEST(Cli, DataErrorsExitTwo) {
  testutil::TempDir dir;
  EXPECT_EQ(cli(dir, "stats --manifest missing.csv").code, 2);
  testutil::write_bytes(dir / "bad.csv", "wav_filename,size\n");
  const CliRun r = cli(dir, "stats --manifest bad.csv");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("wav_filesize"), std::string::npos);
  testutil::write_bytes(dir / "cfg.json", "{\"sead\": 1}");
  EXPECT_EQ(cli(dir, "--config cfg.json synth --out c --n 2").code, 2);
}

TEST(Cli, SynthStatsAndSplit) {
  testutil::TempDir dir;
  ASSERT_EQ(cli(dir, "synth --out corpus --n 12 --seed 4").code, 0);
  const CliRun stats = cli(dir, "stats --manifest corpus/manifest.csv");
  ASSERT_EQ(stats.code, 0);
  EXPECT_NE(stats.out.find("Mean audio length"), std::string::npos);
  ASSERT_EQ(cli(dir, "split --manifest corpus/manifest.csv --out-dir splits --seed 2").code, 0);
  const auto train = read_manifest(dir / "splits/train.csv");
  const auto dev = read_manifest(dir / "splits/dev.csv");
  const auto test = read_manifest(dir / "splits/test.csv");
  EXPECT_EQ(train.size() + dev.size() + test.size(), 12u);
}

TEST(Cli, ConvertWritesSixteenKilohertzMono) {
  testutil::TempDir dir;
  ASSERT_EQ(cli(dir, "synth --out corpus --n 3 --seed 1").code, 0);
  const CliRun r = cli(dir, "convert --in corpus --out wav16 --manifest m.csv --alphabet a.csv --rate 16000");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto entries = read_manifest(dir / "m.csv");
  ASSERT_EQ(entries.size(), 3u);
  for (const auto& e : entries) {
    const WavInfo info = read_wav_info(dir.path() / e.wav_filename);
    EXPECT_EQ(info.sample_rate, 16000);
    EXPECT_EQ(info.channels, 1);
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "a.csv"));
}

TEST(Cli, DecodeSingleFileAndLm) {
  testutil::TempDir dir;
  testutil::write_bytes(dir / "alphabets.csv", " \na\nb\n");
  const Alphabet alphabet = read_alphabet(dir / "alphabets.csv");
  SynthSpec spec;
  spec.transcript = "ab ba";
  spec.confidence = 0.9;
  write_logits(synth_logits(spec, alphabet), dir / "u.ctcl");
  testutil::write_bytes(dir / "text.txt", "ab ba\nab\n");
  ASSERT_EQ(cli(dir, "lm-train --text text.txt --out lm.arpa --order 2 --mode word").code, 0);
  CliRun r = cli(dir, "decode --logits u.ctcl --alphabet alphabets.csv --lm lm.arpa --alpha 0.75 --beta 1.85 --beam 128");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "ab ba\n");
  r = cli(dir, "decode --greedy --logits u.ctcl --alphabet alphabets.csv");
  EXPECT_EQ(r.out, "ab ba\n");
  testutil::write_bytes(dir / "small.csv", "a\n");
  r = cli(dir, "decode --logits u.ctcl --alphabet small.csv");
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, LmScoreMatchesLibrary) {
  testutil::TempDir dir;
  testutil::write_bytes(dir / "text.txt", "a b\na b\na c\n");
  ASSERT_EQ(cli(dir, "lm-train --text text.txt --out lm.arpa --order 2 --mode word").code, 0);
  const CliRun r = cli(dir, "lm-score --lm lm.arpa --text 'a b'");
  ASSERT_EQ(r.code, 0) << r.err;
  const NGramModel m = read_arpa(dir / "lm.arpa");
  const double want = sentence_logprob(m, "a b");
  EXPECT_NEAR(std::stod(r.out.substr(0, r.out.find('\t'))), want, 1e-6);
}

TEST(Cli, EvalPairsAndReport) {
  testutil::TempDir dir;
  testutil::write_bytes(dir / "pairs.csv", "ref,hyp\na b,x y z\n");
  CliRun r = cli(dir, "eval --pairs pairs.csv --format csv");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Overall,1,150.00,"), std::string::npos);
}

TEST(Cli, PipelineOnSynthCorpusIsExactAndDeterministic) {
  testutil::TempDir dir;
  ASSERT_EQ(cli(dir, "synth --out corpus --n 20 --seed 1").code, 0);
  const CliRun a = cli(dir, "pipeline --input corpus --work w1 --seed 3");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("Mean audio length"), std::string::npos);
  EXPECT_NE(a.out.find("Overall"), std::string::npos);
  const std::string report = oracle::slurp(dir / "w1/report.csv");
  EXPECT_NE(report.find("Overall,20,0.00,0.00"), std::string::npos) << report;
  const CliRun b = cli(dir, "--jobs 4 pipeline --input corpus --work w2 --seed 3");
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(oracle::tree(dir / "w1"), oracle::tree(dir / "w2"));
}

TEST(Cli, ConfigFileSuppliesDefaultsAndFlagsOverride) {
  testutil::TempDir dir;
  testutil::write_bytes(dir / "cfg.json", R"({"seed": 5, "split": {"train": 0.5, "dev": 0.25, "test": 0.25}})");
  ASSERT_EQ(cli(dir, "synth --out corpus --n 8 --seed 1").code, 0);
  ASSERT_EQ(cli(dir, "--config cfg.json split --manifest corpus/manifest.csv --out-dir s1").code, 0);
  EXPECT_EQ(read_manifest(dir / "s1/train.csv").size(), 4u);
  ASSERT_EQ(cli(dir, "--config cfg.json split --manifest corpus/manifest.csv --out-dir s2 --train 0.75 "
                     "--dev 0.125 --test 0.125").code,
            0);
  EXPECT_EQ(read_manifest(dir / "s2/train.csv").size(), 6u);
  ASSERT_EQ(cli(dir, "split --manifest corpus/manifest.csv --out-dir s3 --seed 5 --train 0.5 --dev 0.25 "
                     "--test 0.25").code,
            0);
  EXPECT_EQ(oracle::tree(dir / "s1"), oracle::tree(dir / "s3"));
}

// Builds a config from every default in the shipped schema; the CLI must
// accept all of it.
TEST(Cli, ShippedSchemaDefaultsAreAccepted) {
  const auto schema = nlohmann::json::parse(
      io::read_file(std::filesystem::path(MEDSPEECH_SOURCE_DIR) / "docs/pipeline_config.schema.json"));
  nlohmann::json config = nlohmann::json::object();
  std::size_t keys = 0;
  for (const auto& [key, prop] : schema["properties"].items()) {
    if (prop.contains("properties")) {
      for (const auto& [sub, sp] : prop["properties"].items()) {
        if (sp.contains("default")) config[key][sub] = sp["default"];
        ++keys;
      }
    } else if (prop.contains("default")) {
      config[key] = prop["default"];
    }
    ++keys;
  }
  EXPECT_GE(keys, 20u);
  testutil::TempDir dir;
  testutil::write_bytes(dir / "cfg.json", config.dump(2));
  ASSERT_EQ(cli(dir, "synth --out corpus --n 4 --seed 1").code, 0);
  const CliRun r = cli(dir, "--config cfg.json pipeline --input corpus --work w");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "w/report.csv"));
}

}  // namespace
}  // namespace medspeech
