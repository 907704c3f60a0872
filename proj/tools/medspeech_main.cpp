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

// medspeech: corpus preparation, augmentation, LM training, decoding and
// scoring for speech recognition experiments.
//
// Exit status: 0 success, 1 usage error, 2 data or parse error, 3 internal
// error. Diagnostics go to stderr; MEDSPEECH_LOG=error|warn|info|debug sets
// verbosity.

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"

namespace medspeech::cli {
namespace {

struct Globals {
  fs::path config_path;
  std::size_t jobs = 1;
  CLI::Option* jobs_flag = nullptr;
  std::optional<Config> config;

  // Loaded on first use so every subcommand sees the same parsed file.
  const Config& cfg() {
    if (!config) config = config_path.empty() ? Config() : Config::load(config_path);
    return *config;
  }

  std::size_t resolved_jobs() {
    std::size_t j = jobs;
    cfg().fill(jobs_flag, j, "/jobs");
    return std::max<std::size_t>(j, 1);
  }
};

void add_convert(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("convert", "Resample WAVs to mono PCM-16 and write a manifest");
  auto args = std::make_shared<ConvertArgs>();
  auto* in = cmd->add_option("--in", args->in_dir, "Input directory of .wav files");
  cmd->add_option("--out", args->out_dir, "Output directory")->required();
  cmd->add_option("--manifest", args->manifest, "Manifest CSV to write")->required();
  cmd->add_option("--alphabet", args->alphabet, "Also write alphabets.csv here");
  auto* rate = cmd->add_option("--rate", args->rate, "Target sample rate in Hz")->capture_default_str();
  cmd->add_option("--tag", args->tag, "dataset_tag for sidecar-transcript inputs")->capture_default_str();
  cmd->callback([&g, args, in, rate] {
    g.cfg().fill_path(in, args->in_dir, "/input_dir");
    g.cfg().fill(rate, args->rate, "/sample_rate");
    if (args->in_dir.empty()) throw CLI::RequiredError("--in");
    args->jobs = g.resolved_jobs();
    const auto entries = run_convert(*args);
    std::cout << entries.size() << " files converted\n";
  });
}

void add_stats(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("stats", "Duration statistics for a manifest");
  auto manifest = std::make_shared<fs::path>();
  auto out = std::make_shared<fs::path>();
  cmd->add_option("--manifest", *manifest, "Manifest CSV")->required();
  cmd->add_option("--out", *out, "Write the table here instead of stdout");
  cmd->callback([&g, manifest, out] { emit(run_stats(*manifest, g.resolved_jobs()), *out); });
}

void add_split(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("split", "Seeded train/dev/test split of a manifest");
  struct Args {
    fs::path manifest, out_dir;
    SplitRatios ratios;
    std::uint64_t seed = 0;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--manifest", a->manifest, "Manifest CSV")->required();
  cmd->add_option("--out-dir", a->out_dir, "Directory for train.csv, dev.csv, test.csv")->required();
  auto* tr = cmd->add_option("--train", a->ratios.train)->capture_default_str();
  auto* dv = cmd->add_option("--dev", a->ratios.dev)->capture_default_str();
  auto* te = cmd->add_option("--test", a->ratios.test)->capture_default_str();
  auto* seed = cmd->add_option("--seed", a->seed, "Shuffle seed");
  cmd->callback([&g, a, tr, dv, te, seed] {
    g.cfg().fill(tr, a->ratios.train, "/split/train");
    g.cfg().fill(dv, a->ratios.dev, "/split/dev");
    g.cfg().fill(te, a->ratios.test, "/split/test");
    g.cfg().fill(seed, a->seed, "/seed");
    std::cout << run_split(a->manifest, a->out_dir, a->ratios, a->seed);
  });
}

void add_augment(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("augment", "Apply the seeded augmentation pipeline");
  auto a = std::make_shared<AugmentArgs>();
  cmd->add_option("--manifest", a->manifest, "Manifest CSV")->required();
  cmd->add_option("--out-dir", a->out_dir, "Output directory")->required();
  auto* config = cmd->add_option("--augment-config", a->config, "Augmentation JSON");
  auto* noise = cmd->add_option("--noise-dir", a->noise_dir, "Directory of noise .wav files");
  cmd->add_option("--codec-cmd", a->codec_cmd,
                  "External codec round-trip command with {in} and {out} placeholders");
  auto* seed = cmd->add_option("--seed", a->seed, "Pipeline seed");
  cmd->callback([&g, a, config, noise, seed] {
    g.cfg().fill_path(config, a->config, "/augment_config");
    g.cfg().fill_path(noise, a->noise_dir, "/noise_dir");
    g.cfg().fill(seed, a->seed, "/seed");
    a->jobs = g.resolved_jobs();
    std::cout << run_augment(*a);
  });
}

void add_lm_train(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("lm-train", "Train a Kneser-Ney n-gram model and write ARPA");
  auto a = std::make_shared<LmTrainArgs>();
  auto discount = std::make_shared<double>(0.0);
  auto* src = cmd->add_option_group("source");
  src->add_option("--manifest", a->manifest, "Train on manifest transcripts");
  src->add_option("--text", a->text, "Train on a text file, one sentence per line");
  src->require_option(1);
  cmd->add_option("--out", a->out, "ARPA file to write")->required();
  auto* order = cmd->add_option("--order", a->order, "n-gram order")->capture_default_str();
  auto* mode = cmd->add_option("--mode", a->mode, "Token mode: word or char")->capture_default_str();
  auto* disc = cmd->add_option("--discount", *discount, "Fixed discount in (0, 1) for every order");
  cmd->callback([&g, a, discount, order, mode, disc] {
    g.cfg().fill(order, a->order, "/lm/order");
    g.cfg().fill(mode, a->mode, "/lm/mode");
    if (disc->count() > 0) {
      a->discount = *discount;
    } else if (auto d = g.cfg().get<double>("/lm/discount")) {
      a->discount = *d;
    }
    parse_mode(a->mode);
    std::cout << run_lm_train(*a);
  });
}

void add_lm_score(CLI::App& app, Globals&) {
  auto* cmd = app.add_subcommand("lm-score", "Score sentences with an ARPA model");
  struct Args {
    fs::path lm, input;
    std::vector<std::string> text;
    std::string mode;
    bool perplexity = false;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--lm", a->lm, "ARPA file")->required();
  cmd->add_option("--text", a->text, "Sentence to score (repeatable)");
  cmd->add_option("--input", a->input, "File of sentences, one per line");
  cmd->add_option("--mode", a->mode, "Override the token mode recorded in the file");
  cmd->add_flag("--perplexity", a->perplexity, "Also print corpus perplexity");
  cmd->callback([a] {
    std::optional<TokenMode> mode;
    if (!a->mode.empty()) mode = parse_mode(a->mode);
    const NGramModel model = read_arpa(a->lm, mode);
    std::vector<std::string> sentences = a->text;
    if (!a->input.empty()) {
      for (auto& line : read_lines(a->input)) sentences.push_back(std::move(line));
    }
    if (sentences.empty()) throw CLI::RequiredError("--text or --input");
    std::vector<std::string> normalized;
    for (const auto& s : sentences) {
      if (!utf8::is_valid(s)) throw Error(ErrorKind::kInvalidUtf8, "input sentence");
      normalized.push_back(normalize_transcript(s));
      std::cout << format_double("%.6f", sentence_logprob(model, normalized.back())) << "\t"
                << normalized.back() << "\n";
    }
    if (a->perplexity) {
      std::cout << "perplexity\t" << format_double("%.6f", perplexity(model, normalized)) << "\n";
    }
  });
}

void add_decode(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("decode", "CTC decode logit matrices");
  auto a = std::make_shared<DecodeArgs>();
  cmd->add_option("--logits", a->logits, "CTCL file(s)");
  cmd->add_option("--manifest", a->manifest, "Decode <logits-dir>/<wav path>.ctcl for each entry");
  cmd->add_option("--logits-dir", a->logits_dir, "Logit directory for --manifest");
  cmd->add_option("--alphabet", a->alphabet, "alphabets.csv")->required();
  cmd->add_option("--lm", a->lm, "ARPA language model for shallow fusion");
  cmd->add_option("--lm-mode", a->lm_mode, "Override the LM token mode");
  cmd->add_option("--out", a->out, "Write a wav_filename,hyp CSV");
  auto* beam = cmd->add_option("--beam", a->options.beam_width, "Beam width")->capture_default_str();
  auto* alpha = cmd->add_option("--alpha", a->options.alpha, "LM weight")->capture_default_str();
  auto* beta = cmd->add_option("--beta", a->options.beta, "Per-unit bonus")->capture_default_str();
  cmd->add_option("--nbest", a->nbest, "Hypotheses per input (with scores when > 1)")
      ->capture_default_str();
  cmd->add_flag("--greedy", a->greedy, "Greedy decoding instead of beam search");
  cmd->callback([&g, a, beam, alpha, beta] {
    g.cfg().fill(beam, a->options.beam_width, "/decode/beam");
    g.cfg().fill(alpha, a->options.alpha, "/decode/alpha");
    g.cfg().fill(beta, a->options.beta, "/decode/beta");
    if (!a->manifest.empty() && a->logits_dir.empty()) throw CLI::RequiredError("--logits-dir");
    if (a->nbest == 0) throw CLI::ValidationError("--nbest", "must be >= 1");
    a->jobs = g.resolved_jobs();
    std::cout << run_decode(*a);
  });
}

void add_eval(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("eval", "WER/CER report for hypotheses");
  struct Args {
    fs::path pairs, manifest, hyps, out, tallies_out;
    std::string format = "text";
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--pairs", a->pairs, "CSV with header ref,hyp");
  cmd->add_option("--manifest", a->manifest, "Reference manifest (grouped by dataset_tag)");
  cmd->add_option("--hyps", a->hyps, "CSV with header wav_filename,hyp");
  cmd->add_option("--format", a->format, "text or csv")
      ->check(CLI::IsMember({"text", "csv"}))
      ->capture_default_str();
  cmd->add_option("--out", a->out, "Write the report here instead of stdout");
  cmd->add_option("--tallies-out", a->tallies_out, "Write per-group error tallies CSV");
  cmd->callback([&g, a] {
    std::vector<GroupTally> tallies;
    if (!a->pairs.empty()) {
      tallies.push_back(tally_group("all", read_pairs(a->pairs)));
    } else if (!a->manifest.empty() && !a->hyps.empty()) {
      tallies = tally_manifest(a->manifest, a->hyps, g.resolved_jobs());
    } else {
      throw CLI::RequiredError("--pairs, or --manifest with --hyps");
    }
    if (!a->tallies_out.empty()) {
      ensure_parent(a->tallies_out);
      io::write_file(a->tallies_out, format_tallies(tallies));
    }
    emit(render_report(build_report_from_tallies(tallies), a->format), a->out);
  });
}

void add_report(CLI::App& app, Globals&) {
  auto* cmd = app.add_subcommand("report", "Render a report from error tallies");
  struct Args {
    fs::path tallies, out;
    std::string format = "text";
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--tallies", a->tallies,
                  "CSV dataset,utterances,words,word_errors,chars,char_errors")
      ->required();
  cmd->add_option("--format", a->format, "text or csv")
      ->check(CLI::IsMember({"text", "csv"}))
      ->capture_default_str();
  cmd->add_option("--out", a->out, "Write the report here instead of stdout");
  cmd->callback([a] {
    emit(render_report(build_report_from_tallies(parse_tallies(a->tallies)), a->format), a->out);
  });
}

void add_synth(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic tone corpus");
  struct Args {
    fs::path out, vocab;
    std::size_t n = 20;
    std::uint64_t seed = 1;
    int rate = 22050;
  };
  auto a = std::make_shared<Args>();
  cmd->add_option("--out", a->out, "Output directory")->required();
  cmd->add_option("--n", a->n, "Number of utterances")->capture_default_str();
  auto* seed = cmd->add_option("--seed", a->seed, "Seed")->capture_default_str();
  cmd->add_option("--vocab", a->vocab, "Word list, one per line (default: built-in symptoms)");
  cmd->add_option("--rate", a->rate, "Sample rate of generated files")->capture_default_str();
  cmd->callback([&g, a, seed] {
    g.cfg().fill(seed, a->seed, "/seed");
    std::vector<std::string> vocab = default_symptom_vocab();
    if (!a->vocab.empty()) {
      vocab.clear();
      for (auto& w : read_lines(a->vocab)) {
        if (!w.empty()) vocab.push_back(std::move(w));
      }
    }
    SynthCorpusOptions opt;
    opt.sample_rate = a->rate;
    const auto corpus = synth_corpus(a->out, a->n, vocab, a->seed, opt);
    std::cout << corpus.entries.size() << " utterances\n";
  });
}

void add_synth_spec_options(CLI::App* cmd, SynthSpec& spec, CLI::Option** conf,
                            CLI::Option** fpc, CLI::Option** gap, CLI::Option** noise) {
  *conf = cmd->add_option("--confidence", spec.confidence, "Target class probability")
              ->capture_default_str();
  *fpc = cmd->add_option("--frames-per-char", spec.frames_per_char)->capture_default_str();
  *gap = cmd->add_option("--blank-gap", spec.blank_gap_frames)->capture_default_str();
  *noise = cmd->add_option("--noise", spec.noise, "Seeded multiplicative jitter")
               ->capture_default_str();
}

void fill_synth_spec(const Config& c, SynthSpec& spec, CLI::Option* conf, CLI::Option* fpc,
                     CLI::Option* gap, CLI::Option* noise) {
  c.fill(conf, spec.confidence, "/synth/confidence");
  c.fill(fpc, spec.frames_per_char, "/synth/frames_per_char");
  c.fill(gap, spec.blank_gap_frames, "/synth/blank_gap_frames");
  c.fill(noise, spec.noise, "/synth/noise");
}

void add_synth_logits(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("synth-logits", "Write synthetic CTCL matrices for a manifest");
  auto a = std::make_shared<SynthLogitsArgs>();
  cmd->add_option("--manifest", a->manifest, "Manifest CSV")->required();
  cmd->add_option("--alphabet", a->alphabet, "alphabets.csv")->required();
  cmd->add_option("--out-dir", a->out_dir, "Output directory")->required();
  auto* seed = cmd->add_option("--seed", a->seed, "Noise seed");
  CLI::Option *conf, *fpc, *gap, *noise;
  add_synth_spec_options(cmd, a->spec, &conf, &fpc, &gap, &noise);
  cmd->callback([&g, a, seed, conf, fpc, gap, noise] {
    g.cfg().fill(seed, a->seed, "/seed");
    fill_synth_spec(g.cfg(), a->spec, conf, fpc, gap, noise);
    a->jobs = g.resolved_jobs();
    std::cout << run_synth_logits(*a);
  });
}

// convert -> stats -> split -> [augment] -> lm-train -> synth-logits ->
// decode -> eval, all under the work directory.
void add_pipeline(CLI::App& app, Globals& g) {
  auto* cmd = app.add_subcommand("pipeline", "Run every stage end to end");
  struct Args {
    fs::path input, work, augment_config, noise_dir;
    int rate = kDefaultSampleRate;
    int order = 3;
    std::string mode = "word";
    DecoderOptions decode;
    SplitRatios ratios;
    SynthSpec spec;
    std::uint64_t seed = 0;
  };
  auto a = std::make_shared<Args>();
  auto* input = cmd->add_option("--input", a->input, "Corpus directory (wavs + manifest.csv or .txt)");
  auto* work = cmd->add_option("--work", a->work, "Work directory");
  auto* aug = cmd->add_option("--augment-config", a->augment_config, "Augment the train split");
  auto* noise_dir = cmd->add_option("--noise-dir", a->noise_dir, "Noise bank directory");
  auto* rate = cmd->add_option("--rate", a->rate)->capture_default_str();
  auto* order = cmd->add_option("--order", a->order)->capture_default_str();
  auto* mode = cmd->add_option("--mode", a->mode)->capture_default_str();
  auto* beam = cmd->add_option("--beam", a->decode.beam_width)->capture_default_str();
  auto* alpha = cmd->add_option("--alpha", a->decode.alpha)->capture_default_str();
  auto* beta = cmd->add_option("--beta", a->decode.beta)->capture_default_str();
  auto* seed = cmd->add_option("--seed", a->seed);
  CLI::Option *conf, *fpc, *gap, *noise;
  add_synth_spec_options(cmd, a->spec, &conf, &fpc, &gap, &noise);
  cmd->callback([&g, a, input, work, aug, noise_dir, rate, order, mode, beam, alpha, beta, seed,
                 conf, fpc, gap, noise] {
    const Config& c = g.cfg();
    c.fill_path(input, a->input, "/input_dir");
    c.fill_path(work, a->work, "/work_dir");
    c.fill_path(aug, a->augment_config, "/augment_config");
    c.fill_path(noise_dir, a->noise_dir, "/noise_dir");
    c.fill(rate, a->rate, "/sample_rate");
    c.fill(order, a->order, "/lm/order");
    c.fill(mode, a->mode, "/lm/mode");
    c.fill(beam, a->decode.beam_width, "/decode/beam");
    c.fill(alpha, a->decode.alpha, "/decode/alpha");
    c.fill(beta, a->decode.beta, "/decode/beta");
    c.fill(seed, a->seed, "/seed");
    c.fill(nullptr, a->ratios.train, "/split/train");
    c.fill(nullptr, a->ratios.dev, "/split/dev");
    c.fill(nullptr, a->ratios.test, "/split/test");
    fill_synth_spec(c, a->spec, conf, fpc, gap, noise);
    if (a->input.empty()) throw CLI::RequiredError("--input");
    if (a->work.empty()) throw CLI::RequiredError("--work");
    parse_mode(a->mode);
    const std::size_t jobs = g.resolved_jobs();
    const fs::path& w = a->work;

    ConvertArgs conv{a->input, w / "wav", w / "manifest.csv", w / "alphabets.csv", a->rate,
                     "standard", jobs};
    run_convert(conv);
    const std::string stats = run_stats(conv.manifest, jobs);
    io::write_file(w / "stats.txt", stats);
    std::cout << stats << "\n";
    run_split(conv.manifest, w / "splits", a->ratios, a->seed);
    if (!a->augment_config.empty()) {
      AugmentArgs aa{w / "splits" / "train.csv", w / "augmented", a->augment_config,
                     a->noise_dir, "", a->seed, jobs};
      run_augment(aa);
    }
    run_lm_train({conv.manifest, {}, w / "lm.arpa", a->order, a->mode, std::nullopt});
    SynthLogitsArgs sl{conv.manifest, conv.alphabet, w / "logits", a->spec, a->seed, jobs};
    run_synth_logits(sl);
    DecodeArgs da;
    da.manifest = conv.manifest;
    da.logits_dir = w / "logits";
    da.alphabet = conv.alphabet;
    da.lm = w / "lm.arpa";
    da.out = w / "hyps.csv";
    da.options = a->decode;
    da.jobs = jobs;
    run_decode(da);
    const auto tallies = tally_manifest(conv.manifest, da.out, jobs);
    io::write_file(w / "tallies.csv", format_tallies(tallies));
    const EvalReport report = build_report_from_tallies(tallies);
    io::write_file(w / "report.csv", render_report_csv(report));
    std::cout << render_report_table(report);
  });
}

int exit_code_for(const Error& e) {
  return e.kind() == ErrorKind::kInvariant ? kInternalError : kDataError;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Speech corpus preparation, augmentation, decoding and scoring", "medspeech"};
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);
  Globals g;
  app.add_option("--config", g.config_path, "Pipeline config JSON; flags override it");
  g.jobs_flag = app.add_option("--jobs,-j", g.jobs, "Worker threads for per-file stages")
                    ->capture_default_str();

  add_convert(app, g);
  add_stats(app, g);
  add_split(app, g);
  add_augment(app, g);
  add_lm_train(app, g);
  add_lm_score(app, g);
  add_decode(app, g);
  add_eval(app, g);
  add_report(app, g);
  add_synth(app, g);
  add_synth_logits(app, g);
  add_pipeline(app, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    std::cerr << "medspeech: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "medspeech: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "medspeech: internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kOk;
}

}  // namespace medspeech::cli

int main(int argc, char** argv) { return medspeech::cli::run(argc, argv); }
