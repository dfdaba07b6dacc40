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

#include <string>
#include <vector>

#include "common.hpp"
#include "dsp.hpp"
#include "train.hpp"

namespace sctts {

// One synthesis call. Speed is set through exactly one of: an explicit rate
// (sr > 0), a relative length (length_scale > 0, longer output for larger
// values), or neither, which uses the corpus mean rate. Style, for models
// trained with the style encoder, comes either from a reference recording or
// from direct token weights; weights win when both are given.
struct SynthesisRequest {
  std::string text;
  double sr = 0.0;
  double length_scale = 0.0;
  std::string reference_path;
  Tensor token_weights;  // num_heads x num_tokens, rows on the simplex
  double max_frames_margin = 1.3;
  bool monotonic_attention = false;
};

struct SynthesisResult {
  Tensor coarse;       // T_c x mel_bins, the autoregressive output
  MelSpectrogram mel;  // (factor * T_c) x mel_bins, after upsampling
  std::vector<double> wave;
  Tensor attention;    // T_c x P, the rows actually used for decoding
  double resolved_r = 0.0;
  bool hit_cap = false;  // frame cap reached before a silence run appeared
};

// Number of consecutive silent coarse frames that ends generation.
inline constexpr int kSilenceRunFrames = 10;

// sr given -> sr; length_scale given -> mean rate / scale; neither -> mean
// rate. Giving both is an error.
double resolve_rate(const SynthesisRequest& req, const RateStats& stats);

// Zeroes attention weights outside [prev_pos, prev_pos + 3] (clipped to the
// row), renormalizes to sum 1; an empty window falls back to a one-hot one
// step ahead. The caller's new position is the argmax of the result.
std::vector<double> constrain_monotonic(const std::vector<double>& row,
                                        int prev_pos);

// Hard frame budget derived from the rate-length relation T = lambda * P / r,
// widened by the margin and expressed in coarse frames.
int coarse_frame_cap(int num_phonemes, double r, double lambda, double margin,
                     int factor);

// Autoregressive generation: encode text once, then emit coarse frames one at
// a time feeding predictions back, stopping on a silence run or at the frame
// cap. The upsampler and the waveform reconstruction run once at the end.
SynthesisResult synthesize(const SynthesisRequest& req, const Checkpoint& ckpt);

}  // namespace sctts
