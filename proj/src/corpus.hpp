// Copyright (c) 2026 The SCTTS Authors
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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "dsp.hpp"
#include "json.hpp"

namespace sctts {

struct Utterance {
  std::string id;
  std::string audio_path;  // resolved; empty until the corpus is written out
  std::string text;        // whitespace-separated phoneme symbols
  nlohmann::json meta;     // free-form; synthetic ground truth lands here
};

struct Dataset {
  std::vector<Utterance> utterances;
  int sample_rate = 22050;
};

// Knobs of the synthetic-corpus generator. Tokens map to fixed harmonic
// templates; the per-utterance pitch offset is tied to the speed multiplier
// through pitch_speed_correlation so speed-pitch coupling is controllable.
struct SynthConfig {
  int num_utterances = 200;
  int inventory_size = 16;
  int min_tokens = 4;
  int max_tokens = 10;
  int base_token_duration = 10;  // frames at speed 1.0
  double speed_lo = 0.7;
  double speed_hi = 1.5;
  double pitch_base = 220.0;  // Hz
  double pitch_speed_correlation = 0.0;  // in [-1, 1]
  uint64_t seed = 1234;

  void validate() const;
};

// Generator internals that tests and analyses rely on.
inline constexpr int kLeadSilenceMinFrames = 5;
inline constexpr int kLeadSilenceMaxFrames = 20;
inline constexpr double kTokenPitchSpreadHz = 40.0;   // across the inventory
inline constexpr double kSpeedPitchSwingHz = 60.0;    // full-range swing of g
inline constexpr double kPitchNoiseStdHz = 8.0;
inline constexpr double kHarmonicAmps[3] = {1.0, 0.5, 0.25};

// Deterministic pitch offset of a token symbol, spread over the inventory.
double synthetic_token_offset(int token, int inventory_size);

// g of the generator: monotone increasing in the speed multiplier, zero at
// the range midpoint, +/- kSpeedPitchSwingHz at the ends.
double synthetic_speed_pitch_shift(double speed, const SynthConfig& cfg);

struct SyntheticCorpus {
  Dataset dataset;
  std::vector<std::vector<double>> waves;  // parallel to dataset.utterances
};

// Deterministic given cfg.seed. Ground truth (token durations in frames,
// speed multiplier, pitch offset, silence spans) is stored in each meta.
SyntheticCorpus generate_synthetic_corpus(const SynthConfig& cfg,
                                          const FeatureConfig& feat);

// Writes <id>.wav files plus manifest.jsonl into dir, filling audio_path.
// Returns the manifest path.
std::string write_corpus(SyntheticCorpus& corpus, const std::string& dir);

// JSONL manifest ingestion: one {"id", "audio", "text", "meta"?} per line.
// Audio paths resolve relative to the manifest. Every file must exist and
// match the expected sample rate; ids must be unique.
Dataset load_manifest(const std::string& path, int expected_sample_rate = 22050);

// Disjoint, exhaustive, seed-deterministic split; the test side receives
// max(1, round(test_fraction * N)) utterances.
std::pair<Dataset, Dataset> split_dataset(const Dataset& d, double test_fraction,
                                          uint64_t seed);

std::vector<std::string> tokenize_text(const std::string& text);

}  // namespace sctts
