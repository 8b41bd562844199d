// antispoof/synthetic.cc

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

#include "antispoof/synthetic.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

namespace antispoof {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void Finish(Rng &rng, VectorXd *x) {
  double peak = x->cwiseAbs().maxCoeff();
  if (peak > 0.0) *x *= 0.5 / peak;
  for (Eigen::Index i = 0; i < x->size(); ++i) (*x)(i) += 1e-4 * rng.Normal();
}

}  // namespace

Waveform synth_human(Rng &rng, std::size_t num_samples) {
  const double fs = kSampleRate;
  const double f0 = rng.Uniform(90.0, 250.0);
  const double vibrato_rate = rng.Uniform(3.0, 6.0);
  const double vibrato_depth = rng.Uniform(0.01, 0.04);
  const double syllable_rate = rng.Uniform(2.0, 5.0);
  const double noise_gain = rng.Uniform(0.05, 0.2);
  const double env_phase = rng.Uniform(0.0, kTwoPi);
  const int num_harmonics = static_cast<int>(7800.0 / f0);
  std::vector<double> harmonic_phase(num_harmonics);
  for (double &p : harmonic_phase) p = rng.Uniform(0.0, kTwoPi);

  VectorXd x(num_samples);
  double phase = 0.0, noise_state = 0.0;
  for (std::size_t n = 0; n < num_samples; ++n) {
    double t = n / fs;
    double f = f0 * (1.0 + vibrato_depth * std::sin(kTwoPi * vibrato_rate * t));
    phase += kTwoPi * f / fs;
    double voiced = 0.0;
    for (int k = 1; k <= num_harmonics; ++k) {
      if (k * f >= 0.49 * fs) break;
      voiced += std::sin(k * phase + harmonic_phase[k - 1]) / k;
    }
    // one-pole low-pass noise
    noise_state = 0.9 * noise_state + rng.Normal();
    double env = 0.6 + 0.4 * std::sin(kTwoPi * syllable_rate * t + env_phase);
    x(Eigen::Index(n)) = env * (voiced + noise_gain * noise_state);
  }
  Finish(rng, &x);
  return Waveform{x, kSampleRate};
}

Waveform synth_spoof(Rng &rng, std::size_t num_samples) {
  const double fs = kSampleRate;
  const int num_tones = 3 + static_cast<int>(rng.Index(3));
  std::vector<double> freq(num_tones), amp(num_tones), ph(num_tones);
  for (int k = 0; k < num_tones; ++k) {
    freq[k] = rng.Uniform(300.0, 3400.0);
    amp[k] = rng.Uniform(0.3, 1.0);
    ph[k] = rng.Uniform(0.0, kTwoPi);
  }
  VectorXd x(num_samples);
  for (std::size_t n = 0; n < num_samples; ++n) {
    double t = n / fs, v = 0.0;
    for (int k = 0; k < num_tones; ++k) v += amp[k] * std::sin(kTwoPi * freq[k] * t + ph[k]);
    x(Eigen::Index(n)) = v;
  }
  Finish(rng, &x);
  return Waveform{x, kSampleRate};
}

std::vector<ManifestEntry> make_synthetic_corpus(const std::string &dir,
                                                 const SyntheticCorpusOptions &opts) {
  if (opts.num_human < 1 || opts.num_spoof < 1 || opts.seconds <= 0.0 ||
      opts.num_attacks < 1 || opts.num_attacks > kMaxAttack)
    throw Error("bad synthetic corpus options");
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "wav");
  const auto num_samples = static_cast<std::size_t>(opts.seconds * kSampleRate);
  Rng rng(opts.seed);
  std::vector<ManifestEntry> entries;
  auto add = [&](bool human, int index, int count) {
    char id[32];
    std::snprintf(id, sizeof(id), "%s_%04d", human ? "H" : "S", index);
    ManifestEntry e;
    e.utt_id = id;
    e.path = "wav/" + e.utt_id + ".wav";
    e.label = human ? Label::kHuman : Label::kSpoof;
    e.attack = human ? kNoAttack : 1 + index % opts.num_attacks;
    e.partition = index < opts.train_fraction * count ? Partition::kTrain : Partition::kDev;
    Waveform w = human ? synth_human(rng, num_samples) : synth_spoof(rng, num_samples);
    write_waveform((fs::path(dir) / e.path).string(), w);
    entries.push_back(e);
  };
  for (int i = 0; i < opts.num_human; ++i) add(true, i, opts.num_human);
  for (int i = 0; i < opts.num_spoof; ++i) add(false, i, opts.num_spoof);
  write_manifest((fs::path(dir) / "manifest.tsv").string(), entries);
  return entries;
}

}  // namespace antispoof
