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

// Library walk-through: train a character LM on a few transcripts, build
// noisy synthetic logits for one of them, and compare greedy decoding with
// LM-fused beam search.

#include <iostream>
#include <memory>
#include <vector>

#include "medspeech/medspeech.hpp"

int main() {
  using namespace medspeech;
  const std::vector<std::string> transcripts = {
      "মাথা ব্যথা", "জ্বর কাশি", "পেট ব্যথা", "মাথা ঘোরা", "বমি বমি ভাব",
  };
  const Alphabet alphabet = build_alphabet(transcripts);
  auto lm = std::make_shared<const NGramModel>(train_lm(transcripts, 4, TokenMode::kChar));

  SynthSpec spec;
  spec.transcript = transcripts[0];
  spec.confidence = 0.6;
  spec.noise = 1.0;
  spec.seed = 7;
  const LogitMatrix logits = synth_logits(spec, alphabet);

  const Decoder decoder(alphabet, lm, {.beam_width = 64, .alpha = 1.0, .beta = 0.5});
  const std::string greedy = greedy_decode(logits, alphabet);
  const Hypothesis best = decoder.decode(logits).front();

  const std::vector<TextPair> greedy_pair = {{spec.transcript, greedy}};
  const std::vector<TextPair> beam_pair = {{spec.transcript, best.text}};
  std::cout << "reference: " << spec.transcript << "\n"
            << "greedy:    " << greedy << "  (CER " << cer(greedy_pair) << ")\n"
            << "beam+lm:   " << best.text << "  (CER " << cer(beam_pair) << ", score "
            << best.log_score << ")\n";
  return 0;
}
