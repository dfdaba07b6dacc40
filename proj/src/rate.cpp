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

#include "rate.hpp"

#include <cmath>

namespace sctts {

SpeakingRate compute_sr(int num_phonemes, int voiced_frames, double lambda) {
  if (num_phonemes < 1) fail(ErrorCode::kInvalidArgument, "no phonemes");
  if (voiced_frames < 1) fail(ErrorCode::kInvalidArgument, "no voiced frames");
  if (lambda <= 0) fail(ErrorCode::kInvalidArgument, "lambda must be positive");
  SpeakingRate sr;
  sr.lambda = lambda;
  sr.num_phonemes = num_phonemes;
  sr.voiced_frames = voiced_frames;
  sr.r = lambda * num_phonemes / voiced_frames;
  return sr;
}

RateStats average_sr(const std::vector<SpeakingRate>& rates) {
  if (rates.empty()) fail(ErrorCode::kInvalidArgument, "no rates to average");
  double sum = 0.0;
  for (const auto& s : rates) sum += s.r;
  const double mean = sum / rates.size();
  double var = 0.0;
  for (const auto& s : rates) var += (s.r - mean) * (s.r - mean);
  var /= rates.size();
  return RateStats{mean, std::sqrt(var), static_cast<int>(rates.size())};
}

double length_scale_to_sr(const RateStats& stats, double length_scale) {
  if (length_scale <= 0) fail(ErrorCode::kInvalidArgument, "length scale must be positive");
  return stats.mean_r / length_scale;
}

}  // namespace sctts
