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

// Synthetic fixtures: logit matrices spelling a transcript and small tone
// corpora with manifests. Nothing here sounds like speech.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "medspeech/audio.hpp"
#include "medspeech/corpus.hpp"
#include "medspeech/decode.hpp"
#include "medspeech/error.hpp"
#include "medspeech/rng.hpp"
#include "medspeech/utf8.hpp"

namespace medspeech {

struct SynthSpec {
  std::string transcript;
  int frames_per_char = 3;
  int blank_gap_frames = 1;
  double confidence = 1.0;
  std::uint64_t seed = 0;
  // Each probability is scaled by exp(noise * u), u uniform in [-1, 1], then
  // the frame is renormalized. 0 keeps the matrix exact and ignores seed.
  double noise = 0.0;
};

// One leading and one trailing blank frame; frames_per_char frames per
// character with the target class at `confidence`; blank_gap_frames
// blank-dominant frames between equal neighbours. The residual mass is spread
// evenly over the other classes.
inline LogitMatrix synth_logits(const SynthSpec& spec, const Alphabet& alphabet) {
  if (spec.frames_per_char < 2) throw Error(ErrorKind::kInvalidArgument, "frames_per_char must be >= 2");
  if (spec.blank_gap_frames < 1) throw Error(ErrorKind::kInvalidArgument, "blank_gap_frames must be >= 1");
  if (!(spec.confidence > 0.0 && spec.confidence <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "confidence must be in (0, 1]");
  }
  if (!(spec.noise >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "noise must be >= 0");
  if (alphabet.empty()) throw Error(ErrorKind::kInvalidArgument, "empty alphabet");
  const std::vector<int> labels = alphabet.encode(spec.transcript);
  const std::size_t C = alphabet.size() + 1;
  const int blank = static_cast<int>(C) - 1;

  std::vector<int> targets = {blank};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0 && labels[i] == labels[i - 1]) targets.insert(targets.end(), spec.blank_gap_frames, blank);
    targets.insert(targets.end(), spec.frames_per_char, labels[i]);
  }
  targets.push_back(blank);

  const double residual = (1.0 - spec.confidence) / static_cast<double>(C - 1);
  Rng rng(spec.seed);
  std::vector<double> values;
  values.reserve(targets.size() * C);
  std::vector<double> row(C);
  for (int target : targets) {
    for (std::size_t c = 0; c < C; ++c) row[c] = static_cast<int>(c) == target ? spec.confidence : residual;
    if (spec.noise > 0.0) {
      double sum = 0.0;
      for (double& p : row) {
        p *= std::exp(spec.noise * rng.uniform(-1.0, 1.0));
        sum += p;
      }
      for (double& p : row) p /= sum;
    }
    for (double p : row) values.push_back(std::log(p));
  }
  return LogitMatrix::from_log_probs(targets.size(), C, values);
}

// ---------------------------------------------------------------------------
// Tone corpora

inline const std::vector<std::string>& default_symptom_vocab() {
  static const std::vector<std::string> vocab = {
      "জ্বর", "মাথা", "ব্যথা", "কাশি", "পেট", "বমি", "ঠান্ডা", "গলা",
  };
  return vocab;
}

struct SynthCorpusOptions {
  int sample_rate = 22050;
  double amplitude = 0.3;
  double char_seconds = 0.08;
  double gap_seconds = 0.1;  // word gaps and leading/trailing silence
  int max_words = 3;
  std::vector<std::string> tags = {"standard", "sylheti", "synthetic"};
};

struct SynthCorpus {
  std::filesystem::path manifest_path;
  std::filesystem::path alphabet_path;
  std::vector<ManifestEntry> entries;
  Alphabet alphabet;
};

// Stable pitch per code point, well under the 8 kHz band limit.
inline double tone_frequency(char32_t cp) {
  return 300.0 + 50.0 * static_cast<double>(cp % 64);
}

inline AudioClip render_tones(const std::string& transcript, const SynthCorpusOptions& opt) {
  AudioClip clip;
  clip.sample_rate = opt.sample_rate;
  const auto rate = static_cast<double>(opt.sample_rate);
  const auto gap = static_cast<std::size_t>(std::lround(opt.gap_seconds * rate));
  const auto tone = static_cast<std::size_t>(std::lround(opt.char_seconds * rate));
  const auto fade = std::min<std::size_t>(tone / 2, static_cast<std::size_t>(0.005 * rate));
  clip.samples.assign(gap, 0.0);
  for (char32_t cp : utf8::decode(transcript)) {
    if (cp == U' ') {
      clip.samples.insert(clip.samples.end(), gap, 0.0);
      continue;
    }
    const double f = tone_frequency(cp);
    for (std::size_t i = 0; i < tone; ++i) {
      double env = 1.0;
      if (i < fade) env = static_cast<double>(i) / static_cast<double>(fade);
      if (tone - 1 - i < fade) env = static_cast<double>(tone - 1 - i) / static_cast<double>(fade);
      clip.samples.push_back(opt.amplitude * env *
                             std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / rate));
    }
  }
  clip.samples.insert(clip.samples.end(), gap, 0.0);
  return clip;
}

// Writes <dir>/wavs/utt_NNNN.wav, <dir>/manifest.csv and <dir>/alphabets.csv.
// Transcripts are 1..max_words words drawn from vocab.
inline SynthCorpus synth_corpus(const std::filesystem::path& dir, std::size_t n_utterances,
                                const std::vector<std::string>& vocab, std::uint64_t seed,
                                const SynthCorpusOptions& opt = {}) {
  if (vocab.empty()) throw Error(ErrorKind::kInvalidArgument, "empty vocabulary");
  if (n_utterances == 0) throw Error(ErrorKind::kInvalidArgument, "need at least one utterance");
  if (opt.tags.empty() || opt.max_words < 1) {
    throw Error(ErrorKind::kInvalidArgument, "invalid corpus options");
  }
  std::vector<std::string> words;
  for (const auto& w : vocab) {
    std::string norm = normalize_transcript(w);
    if (norm.empty() || norm.find(' ') != std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument, "vocabulary entry '" + w + "' is not one word");
    }
    words.push_back(std::move(norm));
  }

  std::filesystem::create_directories(dir / "wavs");
  Rng rng(seed);
  SynthCorpus out;
  std::vector<std::string> transcripts;
  for (std::size_t u = 0; u < n_utterances; ++u) {
    const auto n_words = rng.uniform_int(1, opt.max_words);
    std::string text;
    for (std::int64_t w = 0; w < n_words; ++w) {
      if (w > 0) text += ' ';
      text += words[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(words.size()) - 1))];
    }
    const auto& tag = opt.tags[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(opt.tags.size()) - 1))];
    char name[32];
    std::snprintf(name, sizeof name, "utt_%04zu.wav", u);
    const std::filesystem::path rel = std::filesystem::path("wavs") / name;
    save_wav(render_tones(text, opt), dir / rel);
    out.entries.push_back({rel.generic_string(), std::filesystem::file_size(dir / rel), text, tag});
    transcripts.push_back(text);
  }
  out.alphabet = build_alphabet(transcripts);
  out.manifest_path = dir / "manifest.csv";
  out.alphabet_path = dir / "alphabets.csv";
  write_manifest(out.entries, out.manifest_path);
  write_alphabet(out.alphabet, out.alphabet_path);
  return out;
}

}  // namespace medspeech
