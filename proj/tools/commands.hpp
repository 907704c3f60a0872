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

// Stage implementations behind the subcommands. Each returns what it would
// print so `pipeline` can chain them in-process.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cli_support.hpp"

namespace medspeech::cli {

// ---------------------------------------------------------------------------
// convert

struct ConvertArgs {
  fs::path in_dir;
  fs::path out_dir;
  fs::path manifest;
  fs::path alphabet;  // optional
  int rate = kDefaultSampleRate;
  std::string tag = "standard";
  std::size_t jobs = 1;
};

// Transcripts come from <in>/manifest.csv when present, else from a sidecar
// .txt next to each wav.
inline std::vector<ManifestEntry> run_convert(const ConvertArgs& a) {
  if (a.rate < kMinResampleRate) {
    throw Error(ErrorKind::kInvalidArgument, "--rate must be >= 4000");
  }
  const auto wavs = list_wavs(a.in_dir);
  if (wavs.empty()) throw Error(ErrorKind::kFileNotFound, "no .wav files under " + a.in_dir.string());

  std::unordered_map<std::string, ManifestEntry> source;
  const fs::path in_manifest = a.in_dir / "manifest.csv";
  const bool have_manifest = fs::exists(in_manifest);
  if (have_manifest) {
    for (const auto& e : read_manifest(in_manifest)) {
      source.emplace(relative_to(entry_path(in_manifest, e), a.in_dir), e);
    }
  }

  const fs::path manifest_dir = a.manifest.parent_path();
  auto entries = parallel_map(wavs.size(), a.jobs, [&](std::size_t i) {
    const fs::path& wav = wavs[i];
    const std::string rel = relative_to(wav, a.in_dir);
    ManifestEntry e;
    e.dataset_tag = a.tag;
    if (have_manifest) {
      auto it = source.find(rel);
      if (it == source.end()) {
        throw Error(ErrorKind::kSchema, rel + " is not listed in " + in_manifest.string());
      }
      e.transcript = it->second.transcript;
      e.dataset_tag = it->second.dataset_tag;
    } else {
      const fs::path sidecar = with_extension(wav, ".txt");
      if (!fs::exists(sidecar)) {
        throw Error(ErrorKind::kFileNotFound, "no transcript for " + rel + " (expected " +
                                                  sidecar.filename().string() + ")");
      }
      e.transcript = io::read_file(sidecar);
    }
    if (!utf8::is_valid(e.transcript)) throw Error(ErrorKind::kInvalidUtf8, "transcript of " + rel);
    e.transcript = normalize_transcript(e.transcript);
    const fs::path out = a.out_dir / with_extension(fs::path(rel), ".wav");
    ensure_parent(out);
    convert(wav, out, a.rate);
    e.wav_filename = relative_to(out, manifest_dir);
    e.wav_filesize = fs::file_size(out);
    log::info("convert: ", i + 1, "/", wavs.size(), " ", rel);
    return e;
  });

  ensure_parent(a.manifest);
  write_manifest(entries, a.manifest);
  if (!a.alphabet.empty()) {
    std::vector<std::string> transcripts;
    for (const auto& e : entries) transcripts.push_back(e.transcript);
    ensure_parent(a.alphabet);
    write_alphabet(build_alphabet(transcripts), a.alphabet);
  }
  return entries;
}

// ---------------------------------------------------------------------------
// stats

inline std::string run_stats(const fs::path& manifest, std::size_t jobs) {
  const auto entries = read_manifest(manifest);
  if (entries.empty()) throw Error(ErrorKind::kInvalidArgument, "manifest has no entries");
  const auto durations = parallel_map(entries.size(), jobs, [&](std::size_t i) {
    const auto info = read_wav_info(entry_path(manifest, entries[i]));
    return static_cast<double>(info.frames) / static_cast<double>(info.sample_rate);
  });
  return render_stats_table(duration_stats(durations));
}

// ---------------------------------------------------------------------------
// split

inline std::string run_split(const fs::path& manifest, const fs::path& out_dir,
                             const SplitRatios& ratios, std::uint64_t seed) {
  auto entries = rebase(read_manifest(manifest), manifest, out_dir);
  const auto split = split_manifest(std::move(entries), ratios, seed);
  fs::create_directories(out_dir);
  write_manifest(split.train, out_dir / "train.csv");
  write_manifest(split.dev, out_dir / "dev.csv");
  write_manifest(split.test, out_dir / "test.csv");
  return "train " + std::to_string(split.train.size()) + "\ndev " +
         std::to_string(split.dev.size()) + "\ntest " + std::to_string(split.test.size()) + "\n";
}

// ---------------------------------------------------------------------------
// augment

struct AugmentArgs {
  fs::path manifest;
  fs::path out_dir;
  fs::path config;  // optional; built-in defaults otherwise
  fs::path noise_dir;
  std::string codec_cmd;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

// Runs `cmd` with {in} and {out} replaced by wav paths. Not covered by tests.
inline AudioClip external_codec(const std::string& cmd, const AudioClip& clip,
                                const fs::path& scratch) {
  fs::create_directories(scratch.parent_path());
  const fs::path in = with_extension(scratch, ".in.wav");
  const fs::path out = with_extension(scratch, ".out.wav");
  save_wav(clip, in);
  std::string line = cmd;
  auto substitute = [&line](const std::string& key, const std::string& value) {
    for (std::size_t pos; (pos = line.find(key)) != std::string::npos;) {
      line.replace(pos, key.size(), "'" + value + "'");
    }
  };
  substitute("{in}", in.string());
  substitute("{out}", out.string());
  if (std::system(line.c_str()) != 0) throw Error(ErrorKind::kIo, "codec command failed: " + line);
  AudioClip result = load_wav(out);
  fs::remove(in);
  fs::remove(out);
  if (result.sample_rate != clip.sample_rate) result = resample(result, clip.sample_rate);
  result.samples.resize(clip.size(), 0.0);
  return result;
}

inline std::string run_augment(const AugmentArgs& a) {
  AugmentConfig config;
  if (!a.config.empty()) {
    try {
      config = augment_config_from_json(nlohmann::json::parse(io::read_file(a.config)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::kParse, a.config.string() + ": " + e.what());
    } catch (const Error& e) {
      rethrow_with_context(e, a.config.string());
    }
  }
  NoiseBank bank;
  if (!a.noise_dir.empty()) {
    for (const auto& wav : list_wavs(a.noise_dir)) {
      AudioClip noise = load_wav(wav);
      if (noise.sample_rate != kDefaultSampleRate) noise = resample(noise, kDefaultSampleRate);
      bank.add(relative_to(wav, a.noise_dir), std::move(noise));
    }
  }
  const auto entries = read_manifest(a.manifest);
  const std::uint64_t seed = a.seed ^ config.pipeline_seed;

  struct Outcome {
    ManifestEntry entry;
    std::vector<Technique> selected, applied;
  };
  auto outcomes = parallel_map(entries.size(), a.jobs, [&](std::size_t i) {
    const auto& e = entries[i];
    AudioClip clip = load_wav(entry_path(a.manifest, e));
    if (clip.sample_rate != kDefaultSampleRate) clip = resample(clip, kDefaultSampleRate);
    const fs::path rel = with_extension(fs::path(relative_to(entry_path(a.manifest, e),
                                                             a.manifest.parent_path())),
                                        ".wav");
    const fs::path out = a.out_dir / rel;
    PipelineHooks hooks;
    if (!a.codec_cmd.empty()) {
      const fs::path scratch = a.out_dir / ".codec" / std::to_string(i);
      hooks.codec = [&a, scratch](const AudioClip& c) { return external_codec(a.codec_cmd, c, scratch); };
    }
    auto result = apply_pipeline(clip, config, bank, mix_seed(seed, i), {}, hooks);
    ensure_parent(out);
    save_wav(result.clip, out);
    write_spectrogram(result.spectrogram, with_extension(out, ".spec"));
    Outcome o{e, result.selected, result.applied};
    o.entry.wav_filename = rel.generic_string();
    o.entry.wav_filesize = fs::file_size(out);
    log::info("augment: ", i + 1, "/", entries.size());
    return o;
  });
  if (!a.codec_cmd.empty()) fs::remove_all(a.out_dir / ".codec");

  std::vector<ManifestEntry> manifest;
  std::string log_csv = csv::format_row({"wav_filename", "selected", "applied"});
  std::array<std::size_t, kTechniques.size()> selected_count{}, applied_count{};
  auto join = [](const std::vector<Technique>& ts) {
    std::string s;
    for (Technique t : ts) {
      if (!s.empty()) s += ';';
      s += technique_name(t);
    }
    return s;
  };
  for (const auto& o : outcomes) {
    manifest.push_back(o.entry);
    log_csv += csv::format_row({o.entry.wav_filename, join(o.selected), join(o.applied)});
    for (Technique t : o.selected) ++selected_count[technique_index(t)];
    for (Technique t : o.applied) ++applied_count[technique_index(t)];
  }
  fs::create_directories(a.out_dir);
  write_manifest(manifest, a.out_dir / "manifest.csv");
  io::write_file(a.out_dir / "augment_log.csv", log_csv);

  std::string summary;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%-16s %8s %8s\n", "technique", "selected", "applied");
  summary += buf;
  for (Technique t : kTechniques) {
    std::snprintf(buf, sizeof buf, "%-16s %8zu %8zu\n", std::string(technique_name(t)).c_str(),
                  selected_count[technique_index(t)], applied_count[technique_index(t)]);
    summary += buf;
  }
  return summary;
}

// ---------------------------------------------------------------------------
// lm-train / lm-score

struct LmTrainArgs {
  fs::path manifest;  // one of manifest / text
  fs::path text;
  fs::path out;
  int order = 3;
  std::string mode = "word";
  std::optional<double> discount;
};

inline std::vector<std::string> training_text(const fs::path& manifest, const fs::path& text) {
  std::vector<std::string> out;
  if (!manifest.empty()) {
    for (const auto& e : read_manifest(manifest)) out.push_back(normalize_transcript(e.transcript));
  } else {
    for (const auto& line : read_lines(text)) {
      if (!utf8::is_valid(line)) throw Error(ErrorKind::kInvalidUtf8, text.string());
      out.push_back(normalize_transcript(line));
    }
  }
  return out;
}

inline std::string run_lm_train(const LmTrainArgs& a) {
  const auto model = train_lm(training_text(a.manifest, a.text), a.order,
                              token_mode_from_string(a.mode), a.discount);
  ensure_parent(a.out);
  write_arpa(model, a.out);
  std::string s;
  for (int n = 1; n <= model.order(); ++n) {
    s += "ngram " + std::to_string(n) + "=" + std::to_string(model.ngram_count(n)) + "\n";
  }
  return s;
}

inline std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// ---------------------------------------------------------------------------
// synth-logits / decode

struct SynthLogitsArgs {
  fs::path manifest;
  fs::path alphabet;
  fs::path out_dir;
  SynthSpec spec;  // transcript ignored
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

inline fs::path logits_path(const fs::path& dir, const ManifestEntry& e) {
  return dir / with_extension(fs::path(e.wav_filename), ".ctcl");
}

inline std::string run_synth_logits(const SynthLogitsArgs& a) {
  const auto entries = read_manifest(a.manifest);
  const Alphabet alphabet = read_alphabet(a.alphabet);
  parallel_map(entries.size(), a.jobs, [&](std::size_t i) {
    SynthSpec spec = a.spec;
    spec.transcript = entries[i].transcript;
    spec.seed = mix_seed(a.seed, i);
    const fs::path out = logits_path(a.out_dir, entries[i]);
    ensure_parent(out);
    write_logits(synth_logits(spec, alphabet), out);
    return 0;
  });
  return std::to_string(entries.size()) + " logit matrices\n";
}

struct DecodeArgs {
  std::vector<fs::path> logits;  // explicit files, or
  fs::path manifest;             // manifest + logits_dir
  fs::path logits_dir;
  fs::path alphabet;
  fs::path lm;
  std::string lm_mode;  // override of the ARPA preamble
  fs::path out;         // hyps CSV (manifest mode)
  DecoderOptions options;
  bool greedy = false;
  std::size_t nbest = 1;
  std::size_t jobs = 1;
};

inline std::string run_decode(const DecodeArgs& a) {
  const Alphabet alphabet = read_alphabet(a.alphabet);
  std::shared_ptr<const NGramModel> lm;
  if (!a.lm.empty()) {
    std::optional<TokenMode> mode;
    if (!a.lm_mode.empty()) mode = token_mode_from_string(a.lm_mode);
    lm = std::make_shared<const NGramModel>(read_arpa(a.lm, mode));
  }
  const Decoder decoder(alphabet, lm, a.options);

  std::vector<fs::path> files = a.logits;
  std::vector<ManifestEntry> entries;
  if (!a.manifest.empty()) {
    entries = read_manifest(a.manifest);
    for (const auto& e : entries) files.push_back(logits_path(a.logits_dir, e));
  }
  if (files.empty()) throw Error(ErrorKind::kInvalidArgument, "nothing to decode");

  const auto results = parallel_map(files.size(), a.jobs, [&](std::size_t i) {
    const LogitMatrix m = read_logits(files[i]);
    if (a.greedy) {
      Hypothesis h;
      h.text = greedy_decode(m, alphabet);
      return std::vector<Hypothesis>{h};
    }
    auto hyps = decoder.decode(m);
    if (hyps.size() > a.nbest) hyps.resize(a.nbest);
    return hyps;
  });

  std::string stdout_text;
  for (const auto& hyps : results) {
    for (const auto& h : hyps) {
      stdout_text += h.text;
      if (a.nbest > 1 && !a.greedy) stdout_text += "\t" + format_double("%.6f", h.log_score);
      stdout_text += "\n";
    }
  }
  if (!a.out.empty()) {
    std::string hyps_csv = csv::format_row({"wav_filename", "hyp"});
    for (std::size_t i = 0; i < files.size(); ++i) {
      const std::string key = i < a.logits.size()
                                  ? files[i].generic_string()
                                  : entries[i - a.logits.size()].wav_filename;
      hyps_csv += csv::format_row({key, results[i].empty() ? std::string() : results[i][0].text});
    }
    ensure_parent(a.out);
    io::write_file(a.out, hyps_csv);
  }
  return stdout_text;
}

// ---------------------------------------------------------------------------
// eval / report

inline std::unordered_map<std::string, std::string> read_hyps(const fs::path& path) {
  const auto records = csv::parse(io::read_file(path));
  if (records.empty() || records[0].fields != csv::Row{"wav_filename", "hyp"}) {
    throw Error(ErrorKind::kSchema, path.string() + ": expected header wav_filename,hyp");
  }
  std::unordered_map<std::string, std::string> out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].fields.size() != 2) {
      throw Error(ErrorKind::kSchema, path.string() + ": expected 2 fields", records[i].line);
    }
    out[records[i].fields[0]] = records[i].fields[1];
  }
  return out;
}

// Groups in order of first appearance in the manifest.
inline std::vector<GroupTally> tally_manifest(const fs::path& manifest, const fs::path& hyps_path,
                                              std::size_t jobs) {
  const auto entries = read_manifest(manifest);
  const auto hyps = read_hyps(hyps_path);
  std::vector<std::string> order;
  std::map<std::string, std::vector<TextPair>> groups;
  for (const auto& e : entries) {
    auto it = hyps.find(e.wav_filename);
    if (it == hyps.end()) throw Error(ErrorKind::kSchema, "no hypothesis for " + e.wav_filename);
    if (groups.find(e.dataset_tag) == groups.end()) order.push_back(e.dataset_tag);
    groups[e.dataset_tag].push_back({e.transcript, it->second});
  }
  return parallel_map(order.size(), jobs,
                      [&](std::size_t i) { return tally_group(order[i], groups.at(order[i])); });
}

inline std::string format_tallies(const std::vector<GroupTally>& tallies) {
  std::string out =
      csv::format_row({"dataset", "utterances", "words", "word_errors", "chars", "char_errors"});
  for (const auto& t : tallies) {
    out += csv::format_row({t.dataset_tag, std::to_string(t.utterances),
                            std::to_string(t.words.ref_len), std::to_string(t.words.errors()),
                            std::to_string(t.chars.ref_len), std::to_string(t.chars.errors())});
  }
  return out;
}

// Error counts are folded into substitutions; only totals matter for rates.
inline std::vector<GroupTally> parse_tallies(const fs::path& path) {
  const auto records = csv::parse(io::read_file(path));
  const csv::Row header = {"dataset", "utterances", "words", "word_errors", "chars", "char_errors"};
  if (records.empty() || records[0].fields != header) {
    throw Error(ErrorKind::kSchema,
                path.string() + ": expected header dataset,utterances,words,word_errors,chars,char_errors");
  }
  auto number = [&](const csv::Record& r, std::size_t i) {
    std::uint64_t v = 0;
    const std::string& s = r.fields[i];
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw Error(ErrorKind::kParse, "'" + s + "' is not a non-negative integer", r.line);
    }
    return v;
  };
  std::vector<GroupTally> out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.fields.size() != header.size()) throw Error(ErrorKind::kSchema, "expected 6 fields", r.line);
    GroupTally t;
    t.dataset_tag = r.fields[0];
    t.utterances = number(r, 1);
    t.words.ref_len = number(r, 2);
    t.words.substitutions = number(r, 3);
    t.chars.ref_len = number(r, 4);
    t.chars.substitutions = number(r, 5);
    out.push_back(std::move(t));
  }
  return out;
}

inline std::string render_report(const EvalReport& report, const std::string& format) {
  return format == "csv" ? render_report_csv(report) : render_report_table(report);
}

}  // namespace medspeech::cli
