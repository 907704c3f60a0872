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
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medspeech/error.hpp"
#include "medspeech/io.hpp"
#include "medspeech/log.hpp"

namespace medspeech {

inline constexpr int kDefaultSampleRate = 16000;
inline constexpr int kMinResampleRate = 4000;

// Mono waveform, full scale 1.0.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

inline double rms(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

inline void clamp_samples(std::vector<double>& samples) {
  for (double& s : samples) s = std::clamp(s, -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// WAV I/O

enum class WavEncoding { kPcm16, kFloat32 };

struct WavInfo {
  WavEncoding encoding = WavEncoding::kPcm16;
  int channels = 1;
  int sample_rate = 0;
  std::size_t frames = 0;
};

namespace wav_detail {

inline std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Parsed {
  WavInfo info;
  const std::uint8_t* data = nullptr;
};

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

inline Parsed parse(std::string_view bytes) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(bytes.data());
  const std::size_t n = bytes.size();
  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 ||
      std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw Error(ErrorKind::kMalformedFile, "missing RIFF/WAVE header");
  }
  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const std::uint8_t* chunk = p + pos;
    std::size_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > n) {
        throw Error(ErrorKind::kMalformedFile, "truncated fmt chunk");
      }
      const std::uint8_t* f = p + body;
      format = read_u16(f);
      channels = read_u16(f + 2);
      rate = read_u32(f + 4);
      block_align = read_u16(f + 12);
      bits = read_u16(f + 14);
      if (format == kFormatExtensible) {
        if (size < 40) {
          throw Error(ErrorKind::kMalformedFile, "truncated extensible fmt");
        }
        format = read_u16(f + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) {
        throw Error(ErrorKind::kMalformedFile, "data chunk before fmt chunk");
      }
      if (body + size > n) {
        log::warn("wav data chunk declares ", size, " bytes but only ",
                  n - body, " are present; truncating");
        size = n - body;
      }
      data = p + body;
      data_size = size;
      break;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) throw Error(ErrorKind::kMalformedFile, "missing fmt chunk");
  if (data == nullptr) throw Error(ErrorKind::kMalformedFile, "missing data chunk");
  if (rate == 0 || channels == 0) {
    throw Error(ErrorKind::kMalformedFile, "zero sample rate or channel count");
  }

  Parsed out;
  if (format == kFormatPcm && bits == 16) {
    out.info.encoding = WavEncoding::kPcm16;
  } else if (format == kFormatFloat && bits == 32) {
    out.info.encoding = WavEncoding::kFloat32;
  } else {
    throw Error(ErrorKind::kUnsupportedEncoding,
                "format tag " + std::to_string(format) + " with " +
                    std::to_string(bits) + " bits per sample");
  }
  if (channels > 2) {
    throw Error(ErrorKind::kUnsupportedEncoding,
                std::to_string(channels) + " channels");
  }
  const std::size_t frame_bytes = static_cast<std::size_t>(channels) * bits / 8;
  if (block_align != frame_bytes) {
    throw Error(ErrorKind::kMalformedFile, "block align does not match format");
  }
  out.info.channels = channels;
  out.info.sample_rate = static_cast<int>(rate);
  out.info.frames = data_size / frame_bytes;
  out.data = data;
  return out;
}

}  // namespace wav_detail

inline WavInfo read_wav_info(const std::filesystem::path& path) {
  const std::string bytes = io::read_file(path);
  try {
    return wav_detail::parse(bytes).info;
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
}

// Loads a PCM-16 or float-32 WAV; stereo is averaged to mono and integer PCM
// is scaled by 1/32768.
inline AudioClip load_wav(const std::filesystem::path& path) {
  const std::string bytes = io::read_file(path);
  wav_detail::Parsed parsed;
  try {
    parsed = wav_detail::parse(bytes);
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
  const WavInfo& info = parsed.info;
  AudioClip clip;
  clip.sample_rate = info.sample_rate;
  clip.samples.resize(info.frames);
  const std::uint8_t* d = parsed.data;
  for (std::size_t f = 0; f < info.frames; ++f) {
    double acc = 0.0;
    for (int ch = 0; ch < info.channels; ++ch) {
      const std::size_t idx = f * info.channels + ch;
      if (info.encoding == WavEncoding::kPcm16) {
        const auto v = static_cast<std::int16_t>(wav_detail::read_u16(d + 2 * idx));
        acc += static_cast<double>(v) / 32768.0;
      } else {
        const std::uint32_t bits = wav_detail::read_u32(d + 4 * idx);
        float v;
        std::memcpy(&v, &bits, sizeof v);
        acc += static_cast<double>(v);
      }
    }
    clip.samples[f] = acc / info.channels;
  }
  return clip;
}

inline std::int16_t to_pcm16(double s) {
  const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

// Serializes interleaved samples. Used directly for multi-channel fixtures;
// save_wav is the mono PCM-16 path.
inline std::string encode_wav(std::span<const double> interleaved, int channels,
                              int sample_rate, WavEncoding encoding) {
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const std::uint16_t format =
      encoding == WavEncoding::kPcm16 ? wav_detail::kFormatPcm : wav_detail::kFormatFloat;
  const auto block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const auto data_bytes = static_cast<std::uint32_t>(interleaved.size() * (bits / 8));

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  wav_detail::put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  wav_detail::put_u32(out, 16);
  wav_detail::put_u16(out, format);
  wav_detail::put_u16(out, static_cast<std::uint16_t>(channels));
  wav_detail::put_u32(out, static_cast<std::uint32_t>(sample_rate));
  wav_detail::put_u32(out, static_cast<std::uint32_t>(sample_rate) * block_align);
  wav_detail::put_u16(out, block_align);
  wav_detail::put_u16(out, bits);
  out += "data";
  wav_detail::put_u32(out, data_bytes);
  for (double s : interleaved) {
    if (encoding == WavEncoding::kPcm16) {
      wav_detail::put_u16(out, static_cast<std::uint16_t>(to_pcm16(s)));
    } else {
      const auto f = static_cast<float>(s);
      std::uint32_t u;
      std::memcpy(&u, &f, sizeof u);
      wav_detail::put_u32(out, u);
    }
  }
  return out;
}

// Writes 16-bit PCM mono; samples are clamped to [-1, 1] and rounded half
// away from zero. +1.0 saturates at 32767.
inline void save_wav(const AudioClip& clip, const std::filesystem::path& path) {
  if (clip.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "cannot save an empty clip");
  }
  io::write_file(path, encode_wav(clip.samples, 1, clip.sample_rate,
                                  WavEncoding::kPcm16));
}

// ---------------------------------------------------------------------------
// Resampling

struct ResamplerParams {
  int taps_per_side = 32;
  double cutoff_fraction = 0.45;  // of min(source, target) rate
};

// Hann-windowed sinc interpolation. The kernel is stretched when decimating
// so that it always spans `taps_per_side` periods of the lower rate. Each
// output sample is normalized by the sum of its kernel weights, which makes
// DC gain exactly 1 and treats samples outside the clip as zeros.
inline AudioClip resample(const AudioClip& clip, int target_rate,
                          const ResamplerParams& params = {}) {
  if (target_rate < kMinResampleRate) {
    throw Error(ErrorKind::kInvalidArgument,
                "target rate " + std::to_string(target_rate) + " below " +
                    std::to_string(kMinResampleRate) + " Hz");
  }
  if (clip.sample_rate <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "clip has no sample rate");
  }
  if (target_rate == clip.sample_rate) return clip;

  const double src = clip.sample_rate;
  const double ratio = target_rate / src;
  const auto out_len =
      static_cast<std::size_t>(std::llround(static_cast<double>(clip.size()) * ratio));
  const double cutoff = params.cutoff_fraction * std::min<double>(src, target_rate) / src;
  const double half_width = params.taps_per_side * std::max(1.0, 1.0 / ratio);
  const auto n = static_cast<std::int64_t>(clip.size());

  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.resize(out_len);
  for (std::size_t m = 0; m < out_len; ++m) {
    const double t = static_cast<double>(m) / ratio;
    const auto k_lo = static_cast<std::int64_t>(std::ceil(t - half_width));
    const auto k_hi = static_cast<std::int64_t>(std::floor(t + half_width));
    double acc = 0.0;
    double weight_sum = 0.0;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
      const double tau = t - static_cast<double>(k);
      const double x = 2.0 * cutoff * tau;
      const double sinc =
          x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * tau / half_width));
      const double h = sinc * window;
      weight_sum += h;
      if (k >= 0 && k < n) acc += clip.samples[static_cast<std::size_t>(k)] * h;
    }
    out.samples[m] = weight_sum != 0.0 ? acc / weight_sum : 0.0;
  }
  return out;
}

// load -> resample -> save. Errors are rethrown with the offending path.
inline AudioClip convert(const std::filesystem::path& in,
                         const std::filesystem::path& out,
                         int target_rate = kDefaultSampleRate) {
  AudioClip clip = load_wav(in);
  try {
    clip = resample(clip, target_rate);
  } catch (const Error& e) {
    rethrow_with_context(e, in.string());
  }
  try {
    save_wav(clip, out);
  } catch (const Error& e) {
    rethrow_with_context(e, out.string());
  }
  return clip;
}

// ---------------------------------------------------------------------------
// Duration statistics

struct DatasetStats {
  std::size_t count = 0;
  double mean_s = 0, std_s = 0, min_s = 0, p25_s = 0, p50_s = 0, p75_s = 0,
         max_s = 0;
};

// Linear interpolation between order statistics of an ascending sequence.
inline double percentile_sorted(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

inline DatasetStats duration_stats(std::span<const double> durations) {
  if (durations.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "no durations");
  }
  for (double d : durations) {
    if (!(d > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "durations must be positive");
    }
  }
  std::vector<double> sorted(durations.begin(), durations.end());
  std::sort(sorted.begin(), sorted.end());
  DatasetStats s;
  s.count = sorted.size();
  double sum = 0.0;
  for (double d : sorted) sum += d;
  s.mean_s = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double d : sorted) ss += (d - s.mean_s) * (d - s.mean_s);
    s.std_s = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  s.min_s = sorted.front();
  s.max_s = sorted.back();
  s.p25_s = percentile_sorted(sorted, 0.25);
  s.p50_s = percentile_sorted(sorted, 0.50);
  s.p75_s = percentile_sorted(sorted, 0.75);
  return s;
}

// Seven-row plain-text table: label left-aligned to 34 columns, value as
// %10.6f, then " seconds".
inline std::string render_stats_table(const DatasetStats& s) {
  const std::array<std::pair<const char*, double>, 7> rows = {{
      {"Mean audio length", s.mean_s},
      {"Standard deviation of audio length", s.std_s},
      {"Shortest audio length", s.min_s},
      {"25%", s.p25_s},
      {"50%", s.p50_s},
      {"75%", s.p75_s},
      {"Longest audio length", s.max_s},
  }};
  std::string out;
  char line[128];
  for (const auto& [label, value] : rows) {
    std::snprintf(line, sizeof line, "%-34s  %10.6f seconds\n", label, value);
    out += line;
  }
  return out;
}

}  // namespace medspeech
