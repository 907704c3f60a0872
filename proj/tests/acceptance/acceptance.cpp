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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed here and nowhere else.

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "medspeech/medspeech.hpp"
#include "oracles.hpp"

namespace medspeech {
namespace {

namespace fs = std::filesystem;

constexpr double kConservationTol = 1e-9;
constexpr double kLmNormTol = 1e-6;
constexpr double kArpaDriftTol = 1e-6;
constexpr double kKnFixtureTol = 1e-9;
constexpr double kOverlayRateTol = 0.02;
constexpr double kOtherRateTol = 0.015;
constexpr double kVolumeTolDb = 0.1;
constexpr double kSnrTolDb = 0.1;
constexpr double kMuLawBound = 0.031;
constexpr double kStatsTol = 1e-6;
constexpr double kOracleSeconds = 10.0;
constexpr double kPipelineSeconds = 30.0;

// Thrown by `check` to end a criterion with a reason.
struct Failed {
  std::string why;
};

void check(bool ok, const std::string& why) {
  if (!ok) throw Failed{why};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

class ScratchDir {
 public:
  ScratchDir() {
    std::string tmpl = (fs::temp_directory_path() / "medspeech-accept-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

int run_cli(const fs::path& cwd, const std::string& args, std::string* out = nullptr) {
  const fs::path capture = cwd / ".stdout";
  const std::string cmd = "cd '" + cwd.string() + "' && '" MEDSPEECH_CLI "' " + args + " >'" +
                          capture.string() + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  if (out) *out = oracle::slurp(capture);
  fs::remove(capture);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Alphabet alphabet_of(std::size_t symbols) {
  std::vector<std::string> chars;
  for (std::size_t i = 0; i < symbols; ++i) chars.push_back(std::string(1, static_cast<char>('a' + i)));
  return Alphabet(chars);
}

// ---------------------------------------------------------------------------

std::string ctc_oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto T = static_cast<std::size_t>(rng.uniform_int(1, 4));
    const auto C = static_cast<std::size_t>(rng.uniform_int(2, 3));
    const LogitMatrix m = oracle::random_logits(rng, T, C);
    const Alphabet a = alphabet_of(C - 1);
    const Hypothesis want = brute_force_decode(m, a, T);
    const Hypothesis got = beam_search(m, a, 1024).front();
    check(got.text == want.text, "instance " + std::to_string(trial) + ": beam '" + got.text +
                                     "' vs oracle '" + want.text + "'");
  }
  const double secs = seconds_since(start);
  check(secs < kOracleSeconds, "took " + fmt(secs) + " s");
  return "200 instances, " + fmt(secs) + " s";
}

std::string ctc_conservation() {
  Rng rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto T = static_cast<std::size_t>(rng.uniform_int(1, 4));
    const auto C = static_cast<std::size_t>(rng.uniform_int(2, 3));
    const LogitMatrix m = oracle::random_logits(rng, T, C);
    double total = 0.0;
    for (const auto& label : oracle::all_labels(static_cast<int>(C) - 1, T)) {
      total += std::exp(ctc_label_logprob(m, label));
    }
    worst = std::max(worst, std::abs(total - 1.0));
  }
  check(worst <= kConservationTol, "max |sum - 1| = " + fmt(worst));
  return "50 instances, max |sum - 1| = " + fmt(worst);
}

std::string lm_fused_oracle() {
  Rng rng(12);
  const Alphabet a({" ", "a", "b"});
  const NGramModel lm = train_lm({"ab ab", "ba", "a b a", "bb", "aab"}, 3, TokenMode::kChar);
  for (int trial = 0; trial < 100; ++trial) {
    const auto T = static_cast<std::size_t>(rng.uniform_int(1, 4));
    const LogitMatrix m = oracle::random_logits(rng, T, 4);
    const Hypothesis want = brute_force_decode(m, a, T, &lm, 1.0, 0.0);
    const Hypothesis got = beam_search(m, a, 1024, &lm, 1.0, 0.0).front();
    check(got.text == want.text, "instance " + std::to_string(trial) + ": beam '" + got.text +
                                     "' vs oracle '" + want.text + "'");
  }
  return "100 instances";
}

std::string random_sentence(Rng& rng, const std::vector<std::string>& words) {
  std::string s;
  const auto n = rng.uniform_int(1, 5);
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += words[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(words.size()) - 1))];
  }
  return s;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(v.size()) - 1))];
}

std::string lm_normalization() {
  const std::vector<std::string> words = {"জ্বর", "মাথা", "ব্যথা", "কাশি", "পেট", "x", "y"};
  Rng rng(101);
  double worst_mass = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto mode = rng.bernoulli(0.5) ? TokenMode::kWord : TokenMode::kChar;
    const int order = static_cast<int>(rng.uniform_int(1, 4));
    std::vector<std::string> corpus(static_cast<std::size_t>(rng.uniform_int(1, 12)));
    for (auto& s : corpus) s = random_sentence(rng, words);
    const NGramModel m = train_lm(corpus, order, mode);
    const auto& vocab = m.vocabulary();
    for (int c = 0; c < 20; ++c) {
      std::vector<NGramModel::TokenId> ctx;
      if (c % 2 == 0) {
        const auto toks = tokenize(pick(rng, corpus), mode);
        ctx.push_back(m.bos_id());
        const auto len = rng.uniform_int(0, static_cast<std::int64_t>(toks.size()));
        for (std::int64_t i = 0; i < len; ++i) ctx.push_back(m.id(toks[static_cast<std::size_t>(i)]));
      } else {
        const auto len = rng.uniform_int(0, order);
        for (int i = 0; i < len; ++i) ctx.push_back(m.id(pick(rng, vocab)));
      }
      double mass = 0.0;
      for (auto v : m.predictable()) mass += std::pow(10.0, m.score(v, ctx));
      worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
    }
  }
  check(worst_mass <= kLmNormTol, "max |mass - 1| = " + fmt(worst_mass));

  ScratchDir dir;
  double worst_drift = 0.0;
  int queries = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto mode = trial % 2 ? TokenMode::kWord : TokenMode::kChar;
    std::vector<std::string> corpus(static_cast<std::size_t>(rng.uniform_int(2, 12)));
    for (auto& s : corpus) s = random_sentence(rng, words);
    const NGramModel m = train_lm(corpus, static_cast<int>(rng.uniform_int(1, 4)), mode);
    write_arpa(m, dir / "m.arpa");
    const NGramModel back = read_arpa(dir / "m.arpa");
    const auto& vocab = m.vocabulary();
    for (int q = 0; q < 50; ++q, ++queries) {
      std::vector<std::string> ctx;
      const auto len = rng.uniform_int(0, m.order());
      for (int i = 0; i < len; ++i) ctx.push_back(pick(rng, vocab));
      const auto& tok = pick(rng, vocab);
      worst_drift = std::max(worst_drift, std::abs(back.score_token(tok, ctx) - m.score_token(tok, ctx)));
    }
  }
  check(queries == 1000, "ran " + std::to_string(queries) + " queries");
  check(worst_drift <= kArpaDriftTol, "ARPA drift " + fmt(worst_drift));
  return "1000 contexts max |mass - 1| = " + fmt(worst_mass) + ", 1000 queries max drift = " +
         fmt(worst_drift);
}

std::string kn_fixture() {
  const NGramModel m = train_lm({"a b", "a b", "a c"}, 2, TokenMode::kWord);
  struct Row {
    const char* token;
    std::vector<std::string> context;
    double want;
  };
  const std::vector<Row> rows = {
      {"a", {}, 0.08},          {"b", {}, 0.08},           {"c", {}, 0.08},
      {"</s>", {}, 0.28},       {"<unk>", {}, 0.48},       {"b", {"a"}, 5.16 / 9.0},
      {"c", {"a"}, 0.24},       {"</s>", {"a"}, 0.56 / 9}, {"<unk>", {"a"}, 0.96 / 9},
      {"a", {"a"}, 0.16 / 9.0}, {"a", {"<s>"}, 8.08 / 9},  {"</s>", {"b"}, 0.88},
      {"</s>", {"c"}, 0.76},
  };
  double worst = 0.0;
  for (const auto& r : rows) {
    worst = std::max(worst, std::abs(std::pow(10.0, m.score_token(r.token, r.context)) - r.want));
  }
  check(worst <= kKnFixtureTol, "max error " + fmt(worst));
  return std::to_string(rows.size()) + " probabilities, max error " + fmt(worst);
}

AudioClip noise_clip(std::uint64_t seed, std::size_t n, double amp) {
  Rng rng(seed);
  AudioClip c{std::vector<double>(n), 16000};
  for (double& v : c.samples) v = rng.uniform(-amp, amp);
  return c;
}

AudioClip tone(double freq, double amp, std::size_t n) {
  return AudioClip{oracle::sine(freq, amp, 16000, n), 16000};
}

NoiseBank small_bank() {
  NoiseBank b;
  b.add("hum", tone(60, 0.3, 4000));
  b.add("hiss", noise_clip(40, 3000, 0.2));
  return b;
}

std::string augment_calibration() {
  const AugmentConfig config;
  const AudioClip clip = tone(500, 0.4, 4000);
  const NoiseBank bank = small_bank();
  std::array<int, kTechniques.size()> hits{};
  const int runs = 10000;
  for (int seed = 0; seed < runs; ++seed) {
    for (Technique t : apply_pipeline(clip, config, bank, static_cast<std::uint64_t>(seed)).selected) {
      ++hits[technique_index(t)];
    }
  }
  std::ostringstream summary;
  for (Technique t : kTechniques) {
    const double rate = hits[technique_index(t)] / static_cast<double>(runs);
    const bool overlay = t == Technique::kOverlay;
    const double want = overlay ? 0.5 : 0.1;
    check(std::abs(rate - want) <= (overlay ? kOverlayRateTol : kOtherRateTol),
          std::string(technique_name(t)) + " rate " + fmt(rate));
    summary << technique_name(t) << "=" << rate << " ";
  }
  return summary.str();
}

Spectrogram smooth_spec(std::size_t frames, std::size_t bins) {
  Spectrogram s;
  s.frames = frames;
  s.bins = bins;
  s.values.resize(frames * bins);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t b = 0; b < bins; ++b) {
      s.values[f * bins + b] = 1.0 + std::sin(0.1 * static_cast<double>(f)) * std::cos(0.2 * static_cast<double>(b));
    }
  }
  return s;
}

std::string augment_identities() {
  // Identity parameters.
  const AudioClip clip = noise_clip(6, 4001, 0.3);
  check(resample_cycle(clip, 16000).samples == clip.samples, "resample at the native rate");
  Rng r0(1);
  check(segment_dropout(clip, 0, {10, 50}, r0).samples == clip.samples, "dropout with zero segments");
  const AudioClip zero{std::vector<double>(100, 0.0), 16000};
  check(codec_sim(zero).samples == zero.samples, "codec on silence");
  const Spectrogram s = smooth_spec(60, 30);
  check(axis_mask(s, Axis::kTime, 0, 3, r0) == s, "time mask of width 0");
  check(axis_mask(s, Axis::kFrequency, 0, 3, r0) == s, "frequency mask of width 0");
  check(axis_scale(s, Axis::kTime, 1.0) == s, "tempo factor 1");
  check(axis_scale(s, Axis::kFrequency, 1.0) == s, "pitch factor 1");
  check(warp(s, 0, r0) == s, "warp of width 0");
  AugmentConfig off;
  off.set_all_probabilities(0.0);
  const AugmentResult none = apply_pipeline(clip, off, small_bank(), 3);
  check(none.clip.samples == clip.samples && none.spectrogram == spectrogram(clip),
        "pipeline with every probability 0");

  Rng rng(12);
  double worst_volume = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const AudioClip c = noise_clip(rng.next_u64(), 3000, rng.uniform(0.01, 0.5));
    const double target = rng.uniform(-40.0, -12.0);
    worst_volume = std::max(worst_volume, std::abs(dbfs(level_volume(c, target)) - target));
  }
  check(worst_volume <= kVolumeTolDb, "volume error " + fmt(worst_volume) + " dB");

  double worst_snr = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(500, 6000));
    const AudioClip c = noise_clip(rng.next_u64(), n, 0.2);
    const AudioClip noise = noise_clip(rng.next_u64(), static_cast<std::size_t>(rng.uniform_int(50, 7000)), 0.3);
    const double snr = rng.uniform(0.0, 30.0);
    const AudioClip out = overlay(c, noise, snr);
    std::vector<double> added(n);
    for (std::size_t i = 0; i < n; ++i) added[i] = out.samples[i] - c.samples[i];
    const double measured = 20.0 * std::log10(oracle::rms(c.samples) / oracle::rms(added));
    worst_snr = std::max(worst_snr, std::abs(measured - snr));
  }
  check(worst_snr <= kSnrTolDb, "SNR error " + fmt(worst_snr) + " dB");

  double worst_mu = 0.0;
  for (int i = -100000; i <= 100000; ++i) {
    const double x = i / 100000.0;
    worst_mu = std::max(worst_mu, std::abs(mu_law_roundtrip(x) - x));
  }
  check(worst_mu <= kMuLawBound, "mu-law error " + fmt(worst_mu));

  Rng outer(21);
  for (Axis axis : {Axis::kTime, Axis::kFrequency}) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Interval> chosen;
      Rng mr(outer.next_u64());
      const Spectrogram out = axis_mask(s, axis, 10, 2, mr, &chosen);
      for (const auto& iv : chosen) {
        for (std::size_t i = iv.start; i < iv.start + iv.length; ++i) {
          const std::size_t others = axis == Axis::kTime ? s.bins : s.frames;
          for (std::size_t o = 0; o < others; ++o) {
            check((axis == Axis::kTime ? out.at(i, o) : out.at(o, i)) == 0.0, "masked cell not zero");
          }
        }
      }
    }
  }
  return "identities exact, volume " + fmt(worst_volume) + " dB, SNR " + fmt(worst_snr) + " dB, mu-law " +
         fmt(worst_mu);
}

std::string edit_distance_oracle() {
  const auto seqs = oracle::all_labels(3, 6);
  std::size_t pairs = 0;
  for (const auto& a : seqs) {
    for (const auto& b : seqs) {
      const EditOps got = edit_distance(a, b);
      const oracle::Ops want = oracle::recursive_edit(a, b);
      check(got.substitutions == want.sub && got.deletions == want.del && got.insertions == want.ins,
            "mismatch at pair " + std::to_string(pairs));
      ++pairs;
    }
  }
  const std::vector<TextPair> micro = {{"a", "b"}, {"a b c d e f g h i", "a b c d e f g h i"}};
  check(wer(micro) == 0.1, "micro-average WER " + fmt(wer(micro)));
  const std::vector<TextPair> over = {{"a b", "x y z"}};
  check(wer(over) == 1.5, "WER above 100% gave " + fmt(wer(over)));
  return std::to_string(pairs) + " pairs, WER 0.1 and 1.5 exact";
}

std::string duration_statistics() {
  DatasetStats s;
  s.count = 1;
  s.mean_s = 3.130898;
  s.std_s = 1.725558;
  s.min_s = 0.6;
  s.p25_s = 2.16;
  s.p50_s = 2.82;
  s.p75_s = 3.744;
  s.max_s = 150.048438;
  const std::string expected =
      "Mean audio length                     3.130898 seconds\n"
      "Standard deviation of audio length    1.725558 seconds\n"
      "Shortest audio length                 0.600000 seconds\n"
      "25%                                   2.160000 seconds\n"
      "50%                                   2.820000 seconds\n"
      "75%                                   3.744000 seconds\n"
      "Longest audio length                150.048438 seconds\n";
  check(render_stats_table(s) == expected, "rendered table differs");
  const std::vector<double> d = {1, 2, 3, 4};
  const DatasetStats f = duration_stats(d);
  check(std::abs(f.mean_s - 2.5) <= kStatsTol, "mean " + fmt(f.mean_s));
  check(std::abs(f.std_s - 1.290994) <= kStatsTol, "std " + fmt(f.std_s));
  check(std::abs(f.p25_s - 1.75) <= kStatsTol, "p25 " + fmt(f.p25_s));
  check(std::abs(f.p50_s - 2.5) <= kStatsTol, "p50 " + fmt(f.p50_s));
  check(std::abs(f.p75_s - 3.25) <= kStatsTol, "p75 " + fmt(f.p75_s));
  return "table byte-identical, {1,2,3,4} within 1e-6";
}

std::string end_to_end_pipeline() {
  ScratchDir dir;
  const auto start = std::chrono::steady_clock::now();
  check(run_cli(dir.path(), "synth --out corpus --n 20 --seed 1") == 0, "synth failed");
  check(run_cli(dir.path(), "pipeline --input corpus --work work --seed 1 --confidence 1.0") == 0,
        "pipeline failed");
  const double secs = seconds_since(start);
  const std::string report = oracle::slurp(dir / "work/report.csv");
  check(report.find("\nOverall,20,0.00,0.00\n") != std::string::npos, "report was:\n" + report);
  check(secs < kPipelineSeconds, "took " + fmt(secs) + " s");
  return "Overall WER 0.00% on 20 utterances, " + fmt(secs) + " s";
}

// Each subcommand runs twice into fresh directories; every produced file and
// stdout must match byte for byte.
std::string cli_determinism() {
  ScratchDir dir;
  check(run_cli(dir.path(), "synth --out corpus --n 12 --seed 2") == 0, "synth setup failed");
  check(run_cli(dir.path(), "convert --in corpus --out wav --manifest m.csv --alphabet a.csv") == 0,
        "convert setup failed");
  check(run_cli(dir.path(), "synth-logits --manifest m.csv --alphabet a.csv --out-dir logits --seed 3 "
                            "--confidence 0.8 --noise 0.5") == 0,
        "synth-logits setup failed");
  check(run_cli(dir.path(), "lm-train --manifest m.csv --out lm.arpa --order 3 --mode char") == 0,
        "lm-train setup failed");
  check(run_cli(dir.path(), "decode --manifest m.csv --logits-dir logits --alphabet a.csv --lm lm.arpa "
                            "--out hyps.csv") == 0,
        "decode setup failed");
  check(run_cli(dir.path(), "eval --manifest m.csv --hyps hyps.csv --tallies-out tallies.csv") == 0,
        "eval setup failed");
  fs::create_directories(dir / "noise");
  save_wav(noise_clip(5, 8000, 0.2), dir / "noise/hiss.wav");

  // {name, argument template}; OUT is replaced per run.
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"synth", "synth --out OUT --n 6 --seed 9"},
      {"convert", "convert --in corpus --out OUT/wav --manifest OUT/m.csv --alphabet OUT/a.csv"},
      {"stats", "stats --manifest m.csv --out OUT/stats.txt"},
      {"split", "split --manifest m.csv --out-dir OUT --seed 4"},
      {"augment", "augment --manifest m.csv --out-dir OUT --noise-dir noise --seed 4"},
      {"lm-train", "lm-train --manifest m.csv --out OUT/lm.arpa --order 3 --mode word"},
      {"lm-score", "lm-score --lm lm.arpa --input corpus/manifest.csv --perplexity"},
      {"synth-logits", "synth-logits --manifest m.csv --alphabet a.csv --out-dir OUT --seed 5 --noise 1.0 "
                       "--confidence 0.7"},
      {"decode", "decode --manifest m.csv --logits-dir logits --alphabet a.csv --lm lm.arpa --nbest 3 "
                 "--out OUT/h.csv"},
      {"eval", "eval --manifest m.csv --hyps hyps.csv --out OUT/r.txt --tallies-out OUT/t.csv"},
      {"report", "report --tallies tallies.csv --format csv --out OUT/r.csv"},
      {"pipeline", "pipeline --input corpus --work OUT --seed 6 --confidence 0.8 --noise 0.5 "
                   "--augment-config AUG"},
  };
  const std::string aug = (fs::path(MEDSPEECH_SOURCE_DIR) / "config/augment_defaults.json").string();
  std::vector<std::string> names;
  for (const auto& [name, tmpl] : commands) {
    std::array<std::string, 2> stdouts;
    std::array<std::map<std::string, std::string>, 2> trees;
    for (int run = 0; run < 2; ++run) {
      const std::string out = "out_" + name + "_" + std::to_string(run);
      fs::create_directories(dir / out);
      std::string args = tmpl;
      for (std::size_t p; (p = args.find("OUT")) != std::string::npos;) args.replace(p, 3, out);
      if (const std::size_t p = args.find("AUG"); p != std::string::npos) args.replace(p, 3, "'" + aug + "'");
      const int code = run_cli(dir.path(), args, &stdouts[run]);
      check(code == 0, name + " exited " + std::to_string(code));
      trees[run] = oracle::tree(dir / out);
    }
    check(stdouts[0] == stdouts[1], name + ": stdout differs");
    check(trees[0] == trees[1], name + ": output files differ");
    check(!trees[0].empty() || !stdouts[0].empty(), name + ": produced nothing");
    names.push_back(name);
  }
  // Worker count must not change bytes either.
  std::string one, four;
  check(run_cli(dir.path(), "pipeline --input corpus --work j1 --seed 6", &one) == 0, "pipeline -j1");
  check(run_cli(dir.path(), "--jobs 4 pipeline --input corpus --work j4 --seed 6", &four) == 0,
        "pipeline -j4");
  check(one == four && oracle::tree(dir / "j1") == oracle::tree(dir / "j4"), "--jobs changes output");
  return std::to_string(names.size()) + " subcommands byte-identical, --jobs 1 vs 4 identical";
}

}  // namespace
}  // namespace medspeech

int main() {
  using medspeech::Failed;
  // Library warnings would interleave with the result lines.
  setenv("MEDSPEECH_LOG", "error", 1);
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
      {"ctc-oracle-equivalence", medspeech::ctc_oracle_equivalence},
      {"ctc-probability-conservation", medspeech::ctc_conservation},
      {"lm-fused-oracle", medspeech::lm_fused_oracle},
      {"lm-normalization-and-arpa-roundtrip", medspeech::lm_normalization},
      {"kneser-ney-hand-fixture", medspeech::kn_fixture},
      {"augment-probability-calibration", medspeech::augment_calibration},
      {"augment-identities-and-bounds", medspeech::augment_identities},
      {"edit-distance-oracle", medspeech::edit_distance_oracle},
      {"duration-statistics", medspeech::duration_statistics},
      {"end-to-end-pipeline", medspeech::end_to_end_pipeline},
      {"cli-determinism", medspeech::cli_determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    std::string detail;
    bool ok = false;
    try {
      detail = fn();
      ok = true;
    } catch (const Failed& f) {
      detail = f.why;
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    failures += ok ? 0 : 1;
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
