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
#include "tensor.hpp"

namespace sctts {

struct FeatureConfig {
  int sample_rate = 22050;
  int fft_size = 1024;
  int hop = 256;
  int window = 1024;
  int mel_bins = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  double floor_db = -100.0;
  int coarse_factor = 4;          // analysis frames per coarse frame
  double silence_threshold = 0.05;  // on the frame mean, normalized units
  int griffin_lim_iters = 60;

  void validate() const;
};

// Normalized log-mel features, every entry in [0, 1].
struct MelSpectrogram {
  Tensor values;  // T x mel_bins
  FeatureConfig config;
};

// Time-decimated mel used as the autoregressive decoder's frame unit.
struct CoarseMel {
  Tensor values;  // ceil(T / factor) x mel_bins
  int factor = 1;
};

struct F0Track {
  std::vector<double> values_hz;  // per frame, 0 when unvoiced
  int frame_hop = 0;
};

// Center-padded STFT magnitudes: (1 + floor(N / hop)) x (fft_size / 2 + 1).
Tensor stft_magnitude(const std::vector<double>& wave, const FeatureConfig& cfg);

// Triangular mel filterbank, mel_bins x (fft_size / 2 + 1).
Tensor mel_filterbank(const FeatureConfig& cfg);

// v = clip((20 log10(max(x, floor_amp)) - floor_db) / -floor_db, 0, 1)
// with floor_amp = 10^(floor_db / 20). Rejects negative entries.
Tensor normalize_mel(const Tensor& amplitude_mel, double floor_db = -100.0);
Tensor denormalize_mel(const Tensor& normalized_mel, double floor_db = -100.0);

MelSpectrogram mel_spectrogram(const std::vector<double>& wave, const FeatureConfig& cfg);

// Keeps the last frame of each group of `factor`; tail groups that extend
// past T read zero-padding, matching the training-time target layout.
CoarseMel coarsen(const MelSpectrogram& mel);

// True where the frame mean is at or above the threshold. Leading, trailing
// and internal silences all come back false.
std::vector<bool> voiced_mask(const MelSpectrogram& mel, double threshold);

// Normalized-autocorrelation pitch tracker, 25 ms windows at hop stride,
// search band 50-500 Hz, parabolic peak refinement.
F0Track estimate_f0(const std::vector<double>& wave, const FeatureConfig& cfg);

// Mel inversion: pseudo-inverse filterbank lift to linear magnitudes, then
// iterative phase reconstruction. Output length is (T - 1) * hop samples.
std::vector<double> griffin_lim(const MelSpectrogram& mel, const FeatureConfig& cfg);

// Feature file: "MEL0" magic, u32 frames, u32 bins, float32 row-major,
// all little-endian.
void write_mel(const std::string& path, const Tensor& mel);
Tensor read_mel(const std::string& path);

}  // namespace sctts
