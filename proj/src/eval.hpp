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

#include <functional>
#include <string>
#include <vector>

#include "common.hpp"
#include "corpus.hpp"
#include "dsp.hpp"
#include "synth.hpp"
#include "train.hpp"

namespace sctts {

// Pearson correlation; NaN when fewer than two points or either side is
// constant.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Least-squares slope of y on x; NaN when x is constant or n < 2.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

// Mean F0 over voiced frames of a waveform; NaN when nothing is voiced.
double mean_voiced_f0(const std::vector<double>& wave, const FeatureConfig& cfg);

struct ScatterRow {
  std::string utt_id;
  double sr = 0.0;
  double mean_f0 = 0.0;
};

struct ScatterResult {
  std::vector<ScatterRow> rows;
  std::vector<std::string> skipped;  // fully silent or unvoiced utterances
  double pearson_r = 0.0;            // NaN when undefined
};

// Rate and mean voiced F0 of every corpus utterance, plus their correlation.
ScatterResult corpus_f0_sr_scatter(const Dataset& ds, const FeatureConfig& cfg,
                                   double lambda);

struct F0SRRow {
  double sr = 0.0;
  double mean_f0 = 0.0;
  double ci95 = 0.0;  // 1.96 * sample std / sqrt(n); 0 when n < 2
  int n = 0;
};

struct LengthControlRow {
  std::string text_id;
  double requested_r = 0.0;
  double achieved_r = 0.0;
  double rel_error = 0.0;
};

struct LengthControlReport {
  std::vector<LengthControlRow> rows;
  // Per text: voiced output length non-decreasing in length_scale and
  // strictly longer at the largest scale than at the smallest.
  std::vector<std::pair<std::string, bool>> monotone;
};

// Injectable synthesis backend so aggregation logic is testable without a
// trained model: text plus an explicit rate in, normalized mel plus waveform
// out.
struct SynthOutput {
  Tensor mel;  // T x mel_bins, normalized like training features
  std::vector<double> wave;
};
using SynthFn = std::function<SynthOutput(const std::string& text, double r)>;

// Wraps a checkpoint as a SynthFn; base supplies everything but text and sr.
// The checkpoint is captured by reference and must outlive the function.
SynthFn checkpoint_synth_fn(const Checkpoint& ckpt, const SynthesisRequest& base);

// Mean voiced F0 of every text synthesized at every grid rate, aggregated
// per rate with a normal-approximation 95% interval. A grid point where no
// output is voiced is an error.
std::vector<F0SRRow> f0_sr_curve(SynthFn synth, const std::vector<std::string>& texts,
                                 const std::vector<double>& sr_grid,
                                 const FeatureConfig& cfg);

// Requested vs achieved rate for every (text, length_scale) pair, where the
// achieved rate is recomputed from voiced output frames, plus a per-text
// monotonicity verdict of voiced length against length_scale.
LengthControlReport length_control_report(SynthFn synth,
                                          const std::vector<std::string>& texts,
                                          const std::vector<double>& length_scales,
                                          const RateStats& stats, double lambda,
                                          const FeatureConfig& cfg);

void write_scatter_csv(const ScatterResult& result, const std::string& path);
void write_f0_sr_csv(const std::vector<F0SRRow>& rows, const std::string& path);
void write_length_control_csv(const LengthControlReport& report,
                              const std::string& path);

}  // namespace sctts
