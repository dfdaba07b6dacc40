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

#include <vector>

#include "common.hpp"

namespace sctts {

// Sentence-level speaking rate: scaled phonemes per voiced frame.
struct SpeakingRate {
  double r = 0.0;
  double lambda = 100.0;
  int num_phonemes = 0;
  int voiced_frames = 0;
};

struct RateStats {
  double mean_r = 0.0;
  double std_r = 0.0;  // population standard deviation
  int n = 0;
};

// r = lambda * num_phonemes / voiced_frames. The caller counts voiced
// frames with silences already excluded.
SpeakingRate compute_sr(int num_phonemes, int voiced_frames, double lambda);

RateStats average_sr(const std::vector<SpeakingRate>& rates);

// Desired output length as a fraction of normal-speed length maps to a
// rate through the inverse proportionality of length and rate.
double length_scale_to_sr(const RateStats& stats, double length_scale);

}  // namespace sctts
