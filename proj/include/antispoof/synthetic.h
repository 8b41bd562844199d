// antispoof/synthetic.h

// Copyright 2026  The antispoof authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ANTISPOOF_SYNTHETIC_H_
#define ANTISPOOF_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "antispoof/eval.h"
#include "antispoof/signal.h"

namespace antispoof {

/// A small labelled corpus for smoke runs: "human" utterances are
/// harmonic-rich voiced signals mixed with coloured noise, "spoof" ones are
/// band-limited sums of tones. Spoof attacks cycle through S1..num_attacks.
struct SyntheticCorpusOptions {
  int num_human = 200;
  int num_spoof = 200;
  double seconds = 1.0;
  int num_attacks = 5;
  double train_fraction = 0.5;  // the rest goes to dev
  std::uint64_t seed = 0;
};

Waveform synth_human(Rng &rng, std::size_t num_samples);
Waveform synth_spoof(Rng &rng, std::size_t num_samples);

/// Writes <dir>/wav/*.wav and <dir>/manifest.tsv (relative paths) and
/// returns the manifest entries.
std::vector<ManifestEntry> make_synthetic_corpus(const std::string &dir,
                                                 const SyntheticCorpusOptions &opts);

}  // namespace antispoof

#endif  // ANTISPOOF_SYNTHETIC_H_
