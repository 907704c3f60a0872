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
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "medspeech/audio.hpp"
#include "medspeech/error.hpp"
#include "medspeech/features.hpp"
#include "medspeech/log.hpp"
#include "medspeech/rng.hpp"

namespace medspeech {

// ---------------------------------------------------------------------------
// Signal-domain augmentations (AudioClip -> AudioClip)

// Loops or trims `noise` to the clip length, scales it so that
// 20*log10(rms(clip)/rms(scaled noise)) == snr_db, adds, clamps.
inline AudioClip overlay(const AudioClip& clip, const AudioClip& noise, double snr_db) {
  if (clip.empty() || noise.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "overlay needs non-empty clip and noise");
  }
  std::vector<double> looped(clip.size());
  for (std::size_t i = 0; i < looped.size(); ++i) looped[i] = noise.samples[i % noise.size()];
  const double clip_rms = rms(clip.samples);
  const double noise_rms = rms(looped);
  if (clip_rms == 0.0 || noise_rms == 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "overlay SNR is undefined for silent input");
  }
  const double gain = clip_rms / (noise_rms * std::pow(10.0, snr_db / 20.0));
  AudioClip out = clip;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += gain * looped[i];
  clamp_samples(out.samples);
  return out;
}

struct SchroederParams {
  std::array<double, 4> comb_delays_ms = {29.7, 37.1, 41.1, 43.7};
  std::array<double, 2> allpass_delays_ms = {5.0, 1.7};
  double allpass_gain = 0.7;
  double wet = 0.5;
  double dry = 0.5;
};

inline std::size_t delay_samples(double ms, int sample_rate) {
  return static_cast<std::size_t>(std::llround(ms * sample_rate / 1000.0));
}

// Four parallel feedback combs y[n] = x[n-D] + g*y[n-D] with
// g = 10^(-3*D/rt60), averaged, then two series all-passs
// y[n] = -a*x[n] + x[n-D] + a*y[n-D]. Output is dry/wet mixed, truncated to
// the input length and clamped.
inline AudioClip reverb(const AudioClip& clip, double rt60_s,
                        const SchroederParams& params = {}) {
  if (!(rt60_s >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "rt60 must be non-negative");
  }
  const std::size_t n = clip.size();
  const auto& x = clip.samples;
  std::vector<double> combs(n, 0.0);
  for (double delay_ms : params.comb_delays_ms) {
    const std::size_t d = delay_samples(delay_ms, clip.sample_rate);
    const double g = rt60_s == 0.0 ? 0.0 : std::pow(10.0, -3.0 * (delay_ms / 1000.0) / rt60_s);
    std::vector<double> y(n, 0.0);
    for (std::size_t i = d; i < n; ++i) y[i] = x[i - d] + g * y[i - d];
    for (std::size_t i = 0; i < n; ++i) combs[i] += y[i] / params.comb_delays_ms.size();
  }
  std::vector<double> wet = std::move(combs);
  for (double delay_ms : params.allpass_delays_ms) {
    const std::size_t d = delay_samples(delay_ms, clip.sample_rate);
    const double a = params.allpass_gain;
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = -a * wet[i];
      if (i >= d) y[i] += wet[i - d] + a * y[i - d];
    }
    wet = std::move(y);
  }
  AudioClip out = clip;
  for (std::size_t i = 0; i < n; ++i) out.samples[i] = params.dry * x[i] + params.wet * wet[i];
  clamp_samples(out.samples);
  return out;
}

inline AudioClip resample_cycle(const AudioClip& clip, int intermediate_rate) {
  return resample(resample(clip, intermediate_rate), clip.sample_rate);
}

inline constexpr double kMuLaw = 255.0;
inline constexpr double kMuLawLevels = 127.0;  // 8-bit signed, symmetric

inline double mu_law_roundtrip(double x) {
  x = std::clamp(x, -1.0, 1.0);
  const double y = std::copysign(std::log1p(kMuLaw * std::abs(x)) / std::log1p(kMuLaw), x);
  const double yq = std::round(y * kMuLawLevels) / kMuLawLevels;
  return std::copysign((std::pow(1.0 + kMuLaw, std::abs(yq)) - 1.0) / kMuLaw, yq);
}

// Lossy-codec stand-in: mu-law (mu = 255) companding to 8 bits and back.
inline AudioClip codec_sim(const AudioClip& clip) {
  AudioClip out = clip;
  for (double& s : out.samples) s = mu_law_roundtrip(s);
  return out;
}

inline double dbfs(const AudioClip& clip) {
  return 20.0 * std::log10(rms(clip.samples));
}

// Uniform gain to reach `target_dbfs` RMS, then clamp. Silent input is
// returned unchanged with a warning.
inline AudioClip level_volume(const AudioClip& clip, double target_dbfs) {
  const double current = rms(clip.samples);
  if (current == 0.0) {
    log::warn("level_volume: silent clip, gain undefined; leaving unchanged");
    return clip;
  }
  const double gain = std::pow(10.0, target_dbfs / 20.0) / current;
  AudioClip out = clip;
  for (double& s : out.samples) s *= gain;
  clamp_samples(out.samples);
  return out;
}

struct Interval {
  std::size_t start = 0;
  std::size_t length = 0;
};

// Zeroes `n_segments` random intervals with lengths drawn uniformly from
// `segment_ms` (milliseconds). Intervals may overlap.
inline AudioClip segment_dropout(const AudioClip& clip, int n_segments,
                                 std::pair<double, double> segment_ms, Rng& rng,
                                 std::vector<Interval>* chosen = nullptr) {
  if (n_segments < 0) {
    throw Error(ErrorKind::kInvalidArgument, "segment count must be non-negative");
  }
  AudioClip out = clip;
  if (clip.empty()) return out;
  const auto to_samples = [&](double ms) {
    return static_cast<std::int64_t>(std::llround(ms * clip.sample_rate / 1000.0));
  };
  const std::int64_t lo = std::max<std::int64_t>(0, to_samples(segment_ms.first));
  const std::int64_t hi = std::max(lo, to_samples(segment_ms.second));
  const auto n = static_cast<std::int64_t>(clip.size());
  for (int s = 0; s < n_segments; ++s) {
    const std::int64_t len = std::min(rng.uniform_int(lo, hi), n);
    const std::int64_t start = rng.uniform_int(0, n - len);
    std::fill(out.samples.begin() + start, out.samples.begin() + start + len, 0.0);
    if (chosen) {
      chosen->push_back({static_cast<std::size_t>(start), static_cast<std::size_t>(len)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Feature-domain augmentations (Spectrogram -> Spectrogram)

enum class Axis { kFrequency, kTime };

inline std::size_t extent(const Spectrogram& spec, Axis axis) {
  return axis == Axis::kTime ? spec.frames : spec.bins;
}

// Each mask: width uniform in [0, max_width], start uniform in
// [0, extent - width]; the covered rows (time) or columns (frequency) are set
// to zero.
inline Spectrogram axis_mask(const Spectrogram& spec, Axis axis, int max_width, int n_masks,
                             Rng& rng, std::vector<Interval>* chosen = nullptr) {
  if (max_width < 0 || n_masks < 0) {
    throw Error(ErrorKind::kInvalidArgument, "mask width and count must be non-negative");
  }
  Spectrogram out = spec;
  const auto ext = static_cast<std::int64_t>(extent(spec, axis));
  std::int64_t width_cap = max_width;
  if (width_cap > ext) {
    log::warn("axis_mask: max width ", max_width, " exceeds axis extent ", ext, "; clamping");
    width_cap = ext;
  }
  if (width_cap == 0) return out;
  for (int m = 0; m < n_masks; ++m) {
    const std::int64_t w = rng.uniform_int(0, width_cap);
    const std::int64_t start = rng.uniform_int(0, ext - w);
    if (chosen) chosen->push_back({static_cast<std::size_t>(start), static_cast<std::size_t>(w)});
    for (std::int64_t i = start; i < start + w; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      if (axis == Axis::kTime) {
        for (std::size_t b = 0; b < out.bins; ++b) out.at(idx, b) = 0.0;
      } else {
        for (std::size_t f = 0; f < out.frames; ++f) out.at(f, idx) = 0.0;
      }
    }
  }
  return out;
}

inline constexpr double kMinScaleFactor = 0.5;
inline constexpr double kMaxScaleFactor = 2.0;

namespace augment_detail {

// Reads the spectrogram along `axis` at fractional position `pos`, with
// linear interpolation and the other coordinate fixed.
inline double sample_axis(const Spectrogram& spec, Axis axis, std::size_t other, double pos) {
  const std::size_t ext = extent(spec, axis);
  pos = std::clamp(pos, 0.0, static_cast<double>(ext - 1));
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, ext - 1);
  const double frac = pos - static_cast<double>(lo);
  auto get = [&](std::size_t i) {
    return axis == Axis::kTime ? spec.at(i, other) : spec.at(other, i);
  };
  return get(lo) * (1.0 - frac) + get(hi) * frac;
}

// Builds a spectrogram whose `axis` has `new_extent` entries; entry j reads
// source position source_pos(j).
template <typename PosFn>
Spectrogram remap_axis(const Spectrogram& spec, Axis axis, std::size_t new_extent,
                       PosFn source_pos) {
  Spectrogram out;
  out.params = spec.params;
  out.frames = axis == Axis::kTime ? new_extent : spec.frames;
  out.bins = axis == Axis::kFrequency ? new_extent : spec.bins;
  out.values.assign(out.frames * out.bins, 0.0);
  if (extent(spec, axis) == 0) return out;
  const std::size_t others = axis == Axis::kTime ? spec.bins : spec.frames;
  for (std::size_t j = 0; j < new_extent; ++j) {
    const double pos = source_pos(j);
    for (std::size_t o = 0; o < others; ++o) {
      const double v = sample_axis(spec, axis, o, pos);
      if (axis == Axis::kTime) {
        out.at(j, o) = v;
      } else {
        out.at(o, j) = v;
      }
    }
  }
  return out;
}

}  // namespace augment_detail

// Stretches the chosen axis by `factor` (new extent = round(old * factor));
// output index j reads source position j / factor.
inline Spectrogram axis_scale(const Spectrogram& spec, Axis axis, double factor) {
  if (!(factor >= kMinScaleFactor && factor <= kMaxScaleFactor)) {
    throw Error(ErrorKind::kInvalidArgument, "scale factor must lie in [0.5, 2.0]");
  }
  if (factor == 1.0) return spec;
  const auto new_extent = static_cast<std::size_t>(
      std::llround(static_cast<double>(extent(spec, axis)) * factor));
  return augment_detail::remap_axis(spec, axis, new_extent, [factor](std::size_t j) {
    return static_cast<double>(j) / factor;
  });
}

// Crops or zero-pads the frequency axis back to `bins` columns.
inline Spectrogram fit_bins(const Spectrogram& spec, std::size_t bins) {
  if (spec.bins == bins) return spec;
  Spectrogram out;
  out.params = spec.params;
  out.frames = spec.frames;
  out.bins = bins;
  out.values.assign(out.frames * bins, 0.0);
  const std::size_t keep = std::min(bins, spec.bins);
  for (std::size_t f = 0; f < spec.frames; ++f) {
    for (std::size_t b = 0; b < keep; ++b) out.at(f, b) = spec.at(f, b);
  }
  return out;
}

// Time warp: a control frame t0 in [W, frames - W) moves to t0 + w with w
// uniform in [-W, W]; both sides are re-timed linearly.
inline Spectrogram warp(const Spectrogram& spec, int max_shift_frames, Rng& rng) {
  if (max_shift_frames < 0) {
    throw Error(ErrorKind::kInvalidArgument, "warp shift must be non-negative");
  }
  const auto frames = static_cast<std::int64_t>(spec.frames);
  const std::int64_t w_max = max_shift_frames;
  if (frames <= 2 * w_max) {
    throw Error(ErrorKind::kInvalidArgument,
                "warp needs more than " + std::to_string(2 * w_max) + " frames, got " +
                    std::to_string(frames));
  }
  if (w_max == 0) return spec;
  const std::int64_t t0 = rng.uniform_int(w_max, frames - w_max - 1);
  const std::int64_t shift = rng.uniform_int(-w_max, w_max);
  const auto src_point = static_cast<double>(t0);
  const auto dst_point = static_cast<double>(t0 + shift);
  const auto last = static_cast<double>(frames - 1);
  return augment_detail::remap_axis(
      spec, Axis::kTime, spec.frames, [=](std::size_t j) {
        const auto x = static_cast<double>(j);
        if (x <= dst_point) {
          return dst_point == 0.0 ? 0.0 : x * src_point / dst_point;
        }
        if (dst_point >= last) return last;
        return src_point + (x - dst_point) * (last - src_point) / (last - dst_point);
      });
}

// ---------------------------------------------------------------------------
// Pipeline configuration

enum class Technique {
  kOverlay,
  kWarp,
  kReverb,
  kFrequencyMask,
  kResample,
  kTimeMask,
  kCodec,
  kDropout,
  kVolume,
  kPitch,
  kTempo,
};

// Canonical technique order; also the application order within each
// domain.
inline constexpr std::array<Technique, 11> kTechniques = {
    Technique::kOverlay,  Technique::kWarp,     Technique::kReverb,
    Technique::kFrequencyMask, Technique::kResample, Technique::kTimeMask,
    Technique::kCodec,    Technique::kDropout,  Technique::kVolume,
    Technique::kPitch,    Technique::kTempo,
};

inline std::string_view technique_name(Technique t) {
  switch (t) {
    case Technique::kOverlay: return "overlay";
    case Technique::kWarp: return "warp";
    case Technique::kReverb: return "reverb";
    case Technique::kFrequencyMask: return "frequency_mask";
    case Technique::kResample: return "resample";
    case Technique::kTimeMask: return "time_mask";
    case Technique::kCodec: return "codec";
    case Technique::kDropout: return "dropout";
    case Technique::kVolume: return "volume";
    case Technique::kPitch: return "pitch";
    case Technique::kTempo: return "tempo";
  }
  return "unknown";
}

inline bool is_signal_domain(Technique t) {
  switch (t) {
    case Technique::kOverlay:
    case Technique::kReverb:
    case Technique::kResample:
    case Technique::kCodec:
    case Technique::kDropout:
    case Technique::kVolume:
      return true;
    default:
      return false;
  }
}

inline std::size_t technique_index(Technique t) { return static_cast<std::size_t>(t); }

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Range&) const = default;
};

struct Toggle {
  bool enabled = true;
  double probability = 0.1;
  bool operator==(const Toggle&) const = default;
};

struct AugmentConfig {
  struct Overlay : Toggle { Range snr_db{5.0, 25.0}; };
  struct Warp : Toggle { int max_shift_frames = 5; };
  struct Reverb : Toggle { Range rt60_s{0.2, 0.8}; };
  struct Mask : Toggle { int max_width = 0; int n_masks = 0; };
  struct Resample : Toggle { Range rate_hz{8000.0, 16000.0}; };
  struct Codec : Toggle {};
  struct Dropout : Toggle { Range n_segments{1.0, 3.0}; Range segment_ms{10.0, 50.0}; };
  struct Volume : Toggle { Range target_dbfs{-35.0, -10.0}; };
  struct Scale : Toggle { Range factor{0.9, 1.1}; };

  Overlay overlay{{true, 0.5}};
  Warp warp;
  Reverb reverb;
  Mask frequency_mask{{true, 0.1}, 27, 2};
  Resample resample;
  Mask time_mask{{true, 0.1}, 10, 2};
  Codec codec;
  Dropout dropout;
  Volume volume;
  Scale pitch;
  Scale tempo;
  std::uint64_t pipeline_seed = 0;

  const Toggle& toggle(Technique t) const {
    switch (t) {
      case Technique::kOverlay: return overlay;
      case Technique::kWarp: return warp;
      case Technique::kReverb: return reverb;
      case Technique::kFrequencyMask: return frequency_mask;
      case Technique::kResample: return resample;
      case Technique::kTimeMask: return time_mask;
      case Technique::kCodec: return codec;
      case Technique::kDropout: return dropout;
      case Technique::kVolume: return volume;
      case Technique::kPitch: return pitch;
      case Technique::kTempo: return tempo;
    }
    throw Error(ErrorKind::kInvariant, "unknown technique");
  }
  Toggle& toggle(Technique t) {
    return const_cast<Toggle&>(std::as_const(*this).toggle(t));
  }

  void set_all_probabilities(double p) {
    for (Technique t : kTechniques) toggle(t).probability = p;
  }

  void validate() const {
    auto fail = [](Technique t, const std::string& what) {
      throw Error(ErrorKind::kInvalidArgument,
                  std::string(technique_name(t)) + ": " + what);
    };
    auto check_range = [&](Technique t, const Range& r) {
      if (!(r.lo <= r.hi)) fail(t, "range must satisfy lo <= hi");
    };
    for (Technique t : kTechniques) {
      const double p = toggle(t).probability;
      if (!(p >= 0.0 && p <= 1.0)) fail(t, "probability must lie in [0, 1]");
    }
    check_range(Technique::kOverlay, overlay.snr_db);
    check_range(Technique::kReverb, reverb.rt60_s);
    if (reverb.rt60_s.lo < 0) fail(Technique::kReverb, "rt60 must be non-negative");
    check_range(Technique::kResample, resample.rate_hz);
    if (resample.rate_hz.lo < kMinResampleRate) fail(Technique::kResample, "rate below 4000 Hz");
    check_range(Technique::kDropout, dropout.n_segments);
    check_range(Technique::kDropout, dropout.segment_ms);
    if (dropout.n_segments.lo < 0 || dropout.segment_ms.lo < 0) {
      fail(Technique::kDropout, "ranges must be non-negative");
    }
    check_range(Technique::kVolume, volume.target_dbfs);
    for (Technique t : {Technique::kPitch, Technique::kTempo}) {
      const Range& r = t == Technique::kPitch ? pitch.factor : tempo.factor;
      check_range(t, r);
      if (r.lo < kMinScaleFactor || r.hi > kMaxScaleFactor) fail(t, "factor outside [0.5, 2.0]");
    }
    if (warp.max_shift_frames < 0) fail(Technique::kWarp, "max_shift_frames must be >= 0");
    for (Technique t : {Technique::kFrequencyMask, Technique::kTimeMask}) {
      const Mask& m = t == Technique::kFrequencyMask ? frequency_mask : time_mask;
      if (m.max_width < 0 || m.n_masks < 0) fail(t, "max_width and n_masks must be >= 0");
    }
  }
};

// JSON layout: one object per technique keyed by technique_name, each with
// "enabled", "probability" and its parameters (ranges as [lo, hi]), plus a
// top-level "pipeline_seed". Missing keys keep their defaults.
namespace augment_detail {

using nlohmann::json;

inline json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

inline Range range_from(const json& j, std::string_view key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorKind::kSchema, std::string(key) + " must be a [lo, hi] number pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace augment_detail

inline nlohmann::json to_json(const AugmentConfig& c) {
  using augment_detail::range_json;
  nlohmann::json j;
  auto base = [&](Technique t) {
    const Toggle& tg = c.toggle(t);
    auto& o = j[std::string(technique_name(t))];
    o["enabled"] = tg.enabled;
    o["probability"] = tg.probability;
    return std::ref(o);
  };
  base(Technique::kOverlay).get()["snr_db"] = range_json(c.overlay.snr_db);
  base(Technique::kWarp).get()["max_shift_frames"] = c.warp.max_shift_frames;
  base(Technique::kReverb).get()["rt60_s"] = range_json(c.reverb.rt60_s);
  {
    auto& o = base(Technique::kFrequencyMask).get();
    o["max_width"] = c.frequency_mask.max_width;
    o["n_masks"] = c.frequency_mask.n_masks;
  }
  base(Technique::kResample).get()["rate_hz"] = range_json(c.resample.rate_hz);
  {
    auto& o = base(Technique::kTimeMask).get();
    o["max_width"] = c.time_mask.max_width;
    o["n_masks"] = c.time_mask.n_masks;
  }
  base(Technique::kCodec);
  {
    auto& o = base(Technique::kDropout).get();
    o["n_segments"] = range_json(c.dropout.n_segments);
    o["segment_ms"] = range_json(c.dropout.segment_ms);
  }
  base(Technique::kVolume).get()["target_dbfs"] = range_json(c.volume.target_dbfs);
  base(Technique::kPitch).get()["factor"] = range_json(c.pitch.factor);
  base(Technique::kTempo).get()["factor"] = range_json(c.tempo.factor);
  j["pipeline_seed"] = c.pipeline_seed;
  return j;
}

inline AugmentConfig augment_config_from_json(const nlohmann::json& j) {
  using augment_detail::range_from;
  if (!j.is_object()) throw Error(ErrorKind::kSchema, "augment config must be a JSON object");
  AugmentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "pipeline_seed") {
      if (!value.is_number_unsigned()) {
        throw Error(ErrorKind::kSchema, "pipeline_seed must be a non-negative integer");
      }
      c.pipeline_seed = value.get<std::uint64_t>();
      continue;
    }
    std::optional<Technique> technique;
    for (Technique t : kTechniques) {
      if (technique_name(t) == key) technique = t;
    }
    if (!technique) throw Error(ErrorKind::kSchema, "unknown augmentation '" + key + "'");
    if (!value.is_object()) throw Error(ErrorKind::kSchema, key + " must be an object");
    const Technique t = *technique;
    for (const auto& [field, v] : value.items()) {
      auto num = [&, &field = field, &v = v]() {
        if (!v.is_number()) throw Error(ErrorKind::kSchema, key + "." + field + " must be a number");
        return v.get<double>();
      };
      auto integer = [&, &field = field, &v = v]() {
        if (!v.is_number_integer()) {
          throw Error(ErrorKind::kSchema, key + "." + field + " must be an integer");
        }
        return v.get<int>();
      };
      const std::string path = key + "." + field;
      if (field == "enabled") {
        if (!v.is_boolean()) throw Error(ErrorKind::kSchema, path + " must be a boolean");
        c.toggle(t).enabled = v.get<bool>();
      } else if (field == "probability") {
        c.toggle(t).probability = num();
      } else if (t == Technique::kOverlay && field == "snr_db") {
        c.overlay.snr_db = range_from(v, path);
      } else if (t == Technique::kWarp && field == "max_shift_frames") {
        c.warp.max_shift_frames = integer();
      } else if (t == Technique::kReverb && field == "rt60_s") {
        c.reverb.rt60_s = range_from(v, path);
      } else if ((t == Technique::kFrequencyMask || t == Technique::kTimeMask) &&
                 (field == "max_width" || field == "n_masks")) {
        auto& m = t == Technique::kFrequencyMask ? c.frequency_mask : c.time_mask;
        (field == "max_width" ? m.max_width : m.n_masks) = integer();
      } else if (t == Technique::kResample && field == "rate_hz") {
        c.resample.rate_hz = range_from(v, path);
      } else if (t == Technique::kDropout && field == "n_segments") {
        c.dropout.n_segments = range_from(v, path);
      } else if (t == Technique::kDropout && field == "segment_ms") {
        c.dropout.segment_ms = range_from(v, path);
      } else if (t == Technique::kVolume && field == "target_dbfs") {
        c.volume.target_dbfs = range_from(v, path);
      } else if ((t == Technique::kPitch || t == Technique::kTempo) && field == "factor") {
        (t == Technique::kPitch ? c.pitch : c.tempo).factor = range_from(v, path);
      } else {
        throw Error(ErrorKind::kSchema, "unknown field '" + path + "'");
      }
    }
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Pipeline

class NoiseBank {
 public:
  void add(std::string label, AudioClip clip) {
    if (clip.sample_rate != kDefaultSampleRate) {
      throw Error(ErrorKind::kInvalidArgument,
                  "noise clip '" + label + "' must be 16 kHz, got " +
                      std::to_string(clip.sample_rate));
    }
    if (clip.empty()) throw Error(ErrorKind::kInvalidArgument, "noise clip '" + label + "' is empty");
    clips_.emplace_back(std::move(label), std::move(clip));
  }
  bool empty() const { return clips_.empty(); }
  std::size_t size() const { return clips_.size(); }
  const std::string& label(std::size_t i) const { return clips_.at(i).first; }
  const AudioClip& clip(std::size_t i) const { return clips_.at(i).second; }

 private:
  std::vector<std::pair<std::string, AudioClip>> clips_;
};

struct PipelineHooks {
  // Replaces the built-in mu-law codec stand-in when set.
  std::function<AudioClip(const AudioClip&)> codec;
};

struct AugmentResult {
  AudioClip clip;
  Spectrogram spectrogram;
  std::vector<Technique> selected;  // Bernoulli draw succeeded
  std::vector<Technique> applied;   // selected and actually performed
};

// One Bernoulli draw per enabled technique, each from its own seeded stream,
// so every decision is independent of the others and of the technique
// parameters. Selected signal-domain techniques run first in kTechniques order,
// then the spectrogram is computed and feature-domain techniques follow.
inline AugmentResult apply_pipeline(const AudioClip& clip, const AugmentConfig& config,
                                    const NoiseBank& noise_bank, std::uint64_t seed,
                                    const SpectrogramParams& spec_params = {},
                                    const PipelineHooks& hooks = {}) {
  config.validate();
  std::vector<Rng> streams;
  streams.reserve(kTechniques.size());
  std::array<bool, kTechniques.size()> selected{};
  for (Technique t : kTechniques) {
    Rng& rng = streams.emplace_back(mix_seed(seed, technique_index(t)));
    const Toggle& tg = config.toggle(t);
    // Always consume the draw so the stream layout does not depend on flags.
    const bool hit = rng.bernoulli(tg.probability);
    selected[technique_index(t)] = tg.enabled && hit;
  }

  AugmentResult result;
  result.clip = clip;
  auto skip = [](Technique t, const std::string& why) {
    log::warn("augment: skipping ", technique_name(t), ": ", why);
  };

  for (Technique t : kTechniques) {
    if (!selected[technique_index(t)]) continue;
    result.selected.push_back(t);
    if (!is_signal_domain(t)) continue;
    Rng& rng = streams[technique_index(t)];
    AudioClip& c = result.clip;
    switch (t) {
      case Technique::kOverlay: {
        if (noise_bank.empty()) {
          skip(t, "noise bank is empty");
          continue;
        }
        const auto idx = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(noise_bank.size()) - 1));
        const double snr = rng.uniform(config.overlay.snr_db.lo, config.overlay.snr_db.hi);
        AudioClip noise = noise_bank.clip(idx);
        if (noise.sample_rate != c.sample_rate) noise = resample(noise, c.sample_rate);
        if (rms(c.samples) == 0.0 || rms(noise.samples) == 0.0) {
          skip(t, "silent clip or noise");
          continue;
        }
        c = overlay(c, noise, snr);
        break;
      }
      case Technique::kReverb:
        c = reverb(c, rng.uniform(config.reverb.rt60_s.lo, config.reverb.rt60_s.hi));
        break;
      case Technique::kResample: {
        const auto rate = static_cast<int>(std::llround(
            rng.uniform(config.resample.rate_hz.lo, config.resample.rate_hz.hi)));
        c = resample_cycle(c, rate);
        clamp_samples(c.samples);
        break;
      }
      case Technique::kCodec:
        c = hooks.codec ? hooks.codec(c) : codec_sim(c);
        break;
      case Technique::kDropout: {
        const auto n = static_cast<int>(rng.uniform_int(
            static_cast<std::int64_t>(std::ceil(config.dropout.n_segments.lo)),
            static_cast<std::int64_t>(std::floor(config.dropout.n_segments.hi))));
        c = segment_dropout(c, n, {config.dropout.segment_ms.lo, config.dropout.segment_ms.hi},
                            rng);
        break;
      }
      case Technique::kVolume:
        if (rms(c.samples) == 0.0) {
          skip(t, "silent clip");
          continue;
        }
        c = level_volume(c, rng.uniform(config.volume.target_dbfs.lo,
                                        config.volume.target_dbfs.hi));
        break;
      default:
        break;
    }
    result.applied.push_back(t);
  }

  SpectrogramParams params = spec_params;
  params.sample_rate = result.clip.sample_rate;
  result.spectrogram = spectrogram(result.clip, params);

  for (Technique t : result.selected) {
    if (is_signal_domain(t)) continue;
    Rng& rng = streams[technique_index(t)];
    Spectrogram& s = result.spectrogram;
    switch (t) {
      case Technique::kWarp:
        if (static_cast<int>(s.frames) <= 2 * config.warp.max_shift_frames) {
          skip(t, "too few frames");
          continue;
        }
        s = warp(s, config.warp.max_shift_frames, rng);
        break;
      case Technique::kFrequencyMask:
        s = axis_mask(s, Axis::kFrequency,
                      std::min<int>(config.frequency_mask.max_width, static_cast<int>(s.bins)),
                      config.frequency_mask.n_masks, rng);
        break;
      case Technique::kTimeMask:
        s = axis_mask(s, Axis::kTime,
                      std::min<int>(config.time_mask.max_width, static_cast<int>(s.frames)),
                      config.time_mask.n_masks, rng);
        break;
      case Technique::kPitch: {
        const std::size_t bins = s.bins;
        s = fit_bins(axis_scale(s, Axis::kFrequency,
                                rng.uniform(config.pitch.factor.lo, config.pitch.factor.hi)),
                     bins);
        break;
      }
      case Technique::kTempo:
        s = axis_scale(s, Axis::kTime, rng.uniform(config.tempo.factor.lo, config.tempo.factor.hi));
        break;
      default:
        break;
    }
    result.applied.push_back(t);
  }
  return result;
}

}  // namespace medspeech
