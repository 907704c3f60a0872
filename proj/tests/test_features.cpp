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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "medspeech/features.hpp"
#include "medspeech/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace medspeech {
namespace {

TEST(Spectrogram, ShapeFollowsFrameFormula) {
  const Spectrogram s = spectrogram(AudioClip{std::vector<double>(16000, 0.0), 16000});
  EXPECT_EQ(s.frames, 49u);
  EXPECT_EQ(s.bins, 257u);
  EXPECT_EQ(s.values.size(), 49u * 257u);
  for (std::size_t n : {0u, 100u, 511u, 512u, 831u, 832u}) {
    const Spectrogram t = spectrogram(AudioClip{std::vector<double>(n, 0.0), 16000});
    const std::size_t expected = n < 512 ? 0 : (n - 512) / 320 + 1;
    EXPECT_EQ(t.frames, expected) << n;
  }
}

TEST(Spectrogram, SilenceGivesZeros) {
  const Spectrogram s = spectrogram(AudioClip{std::vector<double>(4000, 0.0), 16000});
  EXPECT_TRUE(std::all_of(s.values.begin(), s.values.end(), [](double v) { return v == 0.0; }));
}

TEST(Spectrogram, OneKilohertzPeaksAtBin32) {
  const Spectrogram s = spectrogram(AudioClip{oracle::sine(1000, 1.0, 16000, 16000), 16000});
  for (std::size_t f = 0; f < s.frames; ++f) {
    const auto row = s.frame(f);
    EXPECT_EQ(std::max_element(row.begin(), row.end()) - row.begin(), 32) << f;
  }
}

TEST(Spectrogram, MatchesDirectDft) {
  Rng rng(4);
  std::vector<double> x(2000);
  for (double& v : x) v = rng.uniform(-1, 1);
  const Spectrogram s = spectrogram(AudioClip{x, 16000});
  for (std::size_t f : {std::size_t{0}, std::size_t{2}, s.frames - 1}) {
    const auto ref = oracle::frame_magnitude(x, f * 320, 512, 512);
    for (std::size_t k = 0; k < s.bins; ++k) ASSERT_NEAR(s.at(f, k), ref[k], 1e-9);
  }
}

TEST(Spectrogram, NonPowerOfTwoFftUsesDirectTransform) {
  Rng rng(8);
  std::vector<double> x(1200);
  for (double& v : x) v = rng.uniform(-1, 1);
  SpectrogramParams p{400, 160, 480, 16000};
  const Spectrogram s = spectrogram(AudioClip{x, 16000}, p);
  EXPECT_EQ(s.bins, 241u);
  const auto ref = oracle::frame_magnitude(x, 160, 400, 480);
  for (std::size_t k = 0; k < s.bins; ++k) ASSERT_NEAR(s.at(1, k), ref[k], 1e-9);
}

TEST(Spectrogram, MagnitudesScaleLinearlyWithInput) {
  Rng rng(6);
  std::vector<double> x(4000);
  for (double& v : x) v = rng.uniform(-0.3, 0.3);
  const Spectrogram base = spectrogram(AudioClip{x, 16000});
  double previous = base.total_mass();
  for (double k : {1.5, 2.0, 3.0}) {
    std::vector<double> y = x;
    for (double& v : y) v *= k;
    const Spectrogram s = spectrogram(AudioClip{y, 16000});
    EXPECT_NEAR(s.total_mass() / base.total_mass(), k, 1e-6 * k);
    EXPECT_GT(s.total_mass(), previous);
    previous = s.total_mass();
    for (double v : s.values) ASSERT_GE(v, 0.0);
  }
}

TEST(Spectrogram, Errors) {
  EXPECT_ERROR_KIND(spectrogram(AudioClip{std::vector<double>(1000, 0.0), 8000}),
                    ErrorKind::kInvalidArgument);
  SpectrogramParams p;
  p.window_samples = 1024;
  EXPECT_ERROR_KIND(spectrogram(AudioClip{std::vector<double>(2000, 0.0), 16000}, p),
                    ErrorKind::kInvalidArgument);
}

TEST(SpecDump, RoundTripAndValidation) {
  const Spectrogram s = spectrogram(AudioClip{oracle::sine(700, 0.5, 16000, 3000), 16000});
  const std::string bytes = encode_spectrogram(s);
  EXPECT_EQ(bytes.substr(0, 4), "SPEC");
  EXPECT_EQ(bytes.size(), 16 + 4 * s.values.size());
  const Spectrogram back = decode_spectrogram(bytes);
  ASSERT_EQ(back.frames, s.frames);
  ASSERT_EQ(back.bins, s.bins);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    ASSERT_EQ(back.values[i], static_cast<double>(static_cast<float>(s.values[i])));
  }
  EXPECT_ERROR_KIND(decode_spectrogram("SPEX" + bytes.substr(4)), ErrorKind::kMalformedFile);
  EXPECT_ERROR_KIND(decode_spectrogram(bytes.substr(0, bytes.size() - 1)), ErrorKind::kMalformedFile);
}

}  // namespace
}  // namespace medspeech
