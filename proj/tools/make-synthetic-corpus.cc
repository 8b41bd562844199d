// tools/make-synthetic-corpus.cc

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

// Writes a labelled toy corpus (WAVs + manifest.tsv) for smoke runs.

#include <cstdio>

#include "CLI11.hpp"
#include "antispoof/synthetic.h"

int main(int argc, char **argv) {
  CLI::App app{"Generate a synthetic human/spoof corpus"};
  std::string dir;
  antispoof::SyntheticCorpusOptions opts;
  app.add_option("dir", dir, "Output directory")->required();
  app.add_option("--human", opts.num_human, "Human utterances");
  app.add_option("--spoof", opts.num_spoof, "Spoof utterances");
  app.add_option("--seconds", opts.seconds, "Utterance length");
  app.add_option("--attacks", opts.num_attacks, "Distinct attack labels");
  app.add_option("--train-fraction", opts.train_fraction, "Share put in the train partition");
  app.add_option("--seed", opts.seed, "Random seed");
  CLI11_PARSE(app, argc, argv);
  try {
    auto entries = antispoof::make_synthetic_corpus(dir, opts);
    std::fprintf(stderr, "wrote %zu utterances to %s\n", entries.size(), dir.c_str());
  } catch (const std::exception &e) {
    std::fprintf(stderr, "make-synthetic-corpus: %s\n", e.what());
    return 1;
  }
  return 0;
}
