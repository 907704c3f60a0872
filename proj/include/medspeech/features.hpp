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

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "medspeech/audio.hpp"
#include "medspeech/error.hpp"
#include "medspeech/io.hpp"

namespace medspeech {

struct SpectrogramParams {
  int window_samples = 512;  // 32 ms at 16 kHz
  int hop_samples = 320;     // 20 ms
  int fft_size = 512;
  int sample_rate = kDefaultSampleRate;

  bool operator==(const SpectrogramParams&) const = default;
};

// Frames x bins magnitude matrix, row-major by frame.
struct Spectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<double> values;
  SpectrogramParams params;

  double& at(std::size_t frame, std::size_t bin) { return values[frame * bins + bin]; }
  double at(std::size_t frame, std::size_t bin) const { return values[frame * bins + bin]; }
  std::span<const double> frame(std::size_t f) const {
    return std::span<const double>(values).subspan(f * bins, bins);
  }

  double total_mass() const {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }

  bool operator==(const Spectrogram&) const = default;
};

inline std::size_t frame_count(std::size_t samples, std::size_t window, std::size_t hop) {
  if (samples < window) return 0;
  return (samples - window) / hop + 1;
}

namespace fft_detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey.
inline void radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

inline void dft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc;
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) /
                           static_cast<double>(n);
      acc += a[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  a = std::move(out);
}

}  // namespace fft_detail

// Hann-windowed (periodic) STFT magnitude.
inline Spectrogram spectrogram(const AudioClip& clip,
                               const SpectrogramParams& params = {}) {
  if (clip.sample_rate != params.sample_rate) {
    throw Error(ErrorKind::kInvalidArgument,
                "clip rate " + std::to_string(clip.sample_rate) +
                    " does not match spectrogram rate " +
                    std::to_string(params.sample_rate));
  }
  if (params.window_samples <= 0 || params.hop_samples <= 0 ||
      params.window_samples > params.fft_size) {
    throw Error(ErrorKind::kInvalidArgument, "invalid spectrogram frame parameters");
  }
  const auto window = static_cast<std::size_t>(params.window_samples);
  const auto hop = static_cast<std::size_t>(params.hop_samples);
  const auto nfft = static_cast<std::size_t>(params.fft_size);

  Spectrogram spec;
  spec.params = params;
  spec.bins = nfft / 2 + 1;
  spec.frames = frame_count(clip.size(), window, hop);
  spec.values.assign(spec.frames * spec.bins, 0.0);

  std::vector<double> hann(window);
  for (std::size_t i = 0; i < window; ++i) {
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                   static_cast<double>(window));
  }
  const bool pow2 = fft_detail::is_power_of_two(nfft);
  std::vector<std::complex<double>> buf(nfft);
  for (std::size_t f = 0; f < spec.frames; ++f) {
    std::fill(buf.begin(), buf.end(), std::complex<double>());
    const std::size_t start = f * hop;
    for (std::size_t i = 0; i < window; ++i) buf[i] = clip.samples[start + i] * hann[i];
    if (pow2) {
      fft_detail::radix2(buf);
    } else {
      fft_detail::dft(buf);
    }
    for (std::size_t k = 0; k < spec.bins; ++k) spec.at(f, k) = std::abs(buf[k]);
  }
  return spec;
}

// Debug dump: "SPEC", u32 version=1, u32 frames, u32 bins, then frames*bins
// little-endian f32, row-major. Frame parameters are not stored.
inline std::string encode_spectrogram(const Spectrogram& spec) {
  std::string out = "SPEC";
  auto put_u32 = [&out](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  put_u32(1);
  put_u32(static_cast<std::uint32_t>(spec.frames));
  put_u32(static_cast<std::uint32_t>(spec.bins));
  for (double v : spec.values) {
    const auto f = static_cast<float>(v);
    std::uint32_t u;
    std::memcpy(&u, &f, sizeof u);
    put_u32(u);
  }
  return out;
}

inline Spectrogram decode_spectrogram(std::string_view bytes,
                                      const SpectrogramParams& params = {}) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(bytes.data());
  if (bytes.size() < 16 || std::memcmp(p, "SPEC", 4) != 0) {
    throw Error(ErrorKind::kMalformedFile, "missing SPEC magic");
  }
  auto u32 = [p](std::size_t off) {
    return static_cast<std::uint32_t>(p[off]) | (static_cast<std::uint32_t>(p[off + 1]) << 8) |
           (static_cast<std::uint32_t>(p[off + 2]) << 16) |
           (static_cast<std::uint32_t>(p[off + 3]) << 24);
  };
  if (u32(4) != 1) throw Error(ErrorKind::kMalformedFile, "unsupported SPEC version");
  Spectrogram spec;
  spec.params = params;
  spec.frames = u32(8);
  spec.bins = u32(12);
  const std::size_t count = spec.frames * spec.bins;
  if (bytes.size() != 16 + 4 * count) {
    throw Error(ErrorKind::kMalformedFile, "SPEC payload size mismatch");
  }
  spec.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t u = u32(16 + 4 * i);
    float f;
    std::memcpy(&f, &u, sizeof f);
    spec.values[i] = f;
  }
  return spec;
}

inline void write_spectrogram(const Spectrogram& spec, const std::filesystem::path& path) {
  io::write_file(path, encode_spectrogram(spec));
}

inline Spectrogram read_spectrogram(const std::filesystem::path& path) {
  return decode_spectrogram(io::read_file(path));
}

}  // namespace medspeech
