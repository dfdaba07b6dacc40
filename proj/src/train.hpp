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
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "corpus.hpp"
#include "dsp.hpp"
#include "model.hpp"
#include "rate.hpp"

namespace sctts {

struct TrainConfig {
  // Coarse-loss weight schedule: alpha is 1 through the hold step, falls
  // linearly, and reaches 0 at the zero step. scale shrinks both milestones
  // together so short runs keep the schedule's shape.
  int alpha_hold_steps = 50000;
  int alpha_zero_step = 200000;
  double scale = 1.0;

  double learning_rate = 0.001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  int batch_size = 16;
  int max_steps = 1000;
  uint64_t seed = 1;
  int checkpoint_every = 0;  // 0 writes only the final checkpoint
  double lambda = 100.0;     // speaking-rate scale for ground-truth rates

  void validate() const;
  int scaled_hold_steps() const;
  int scaled_zero_step() const;
};

double alpha_schedule(int step, const TrainConfig& cfg);

// Mean L1 plus mean elementwise binary divergence; zero iff pred == target
// up to the prediction clamp.
Var spectrogram_loss(Graph& g, Var pred, const Tensor& target);
// Same, with entries where mask == 0 excluded from both terms. The
// denominator is the number of unmasked entries.
Var spectrogram_loss_masked(Graph& g, Var pred, const Tensor& target,
                            const Tensor& mask);

// alpha * coarse term + full-mel term; the mel target is padded to the
// prediction length and masked past its true frames.
Var total_loss(Graph& g, Var coarse_pred, const Tensor& coarse_target,
               Var mel_pred, const Tensor& mel_target, const Tensor& mel_mask,
               double alpha);

struct AdamState {
  std::map<std::string, Tensor> m, v;
  int64_t t = 0;
};

// One Adam update; every bound parameter must have a gradient entry.
void adam_apply(const std::vector<std::pair<std::string, Tensor*>>& params,
                const std::map<std::string, Tensor>& grads, AdamState& state,
                const TrainConfig& cfg);

// Everything the network needs for one utterance, precomputed once.
struct PreparedUtterance {
  std::string id;
  std::vector<int> phonemes;
  Tensor mel;       // T x bins, normalized
  Tensor coarse;    // T_c x bins
  Tensor teacher;   // coarse shifted right one frame, zero first frame
  Tensor mel_pad;   // (T_c * factor) x bins, mel zero-padded at the tail
  Tensor mel_mask;  // 1 on real frames, 0 on the padded tail
  double r = 0.0;   // ground-truth speaking rate
};

PreparedUtterance prepare_utterance(const Utterance& utt, const Vocabulary& vocab,
                                    const FeatureConfig& fcfg, double lambda);

struct StepResult {
  int step = 0;
  double alpha = 0.0;
  double loss_coarse = 0.0;
  double loss_mel = 0.0;
  double total = 0.0;
};

// One optimizer update over a batch: per-utterance forward/backward with
// gradients averaged across the batch. Aborts on a non-finite loss, naming
// the step and the batch ids.
StepResult train_step(const std::vector<const PreparedUtterance*>& batch,
                      ModelParams& params, const ModelConfig& mcfg,
                      const RateStats& stats, AdamState& opt, int step,
                      const TrainConfig& tcfg, std::mt19937_64* dropout_rng);

struct Checkpoint {
  ModelConfig model;
  FeatureConfig features;
  Vocabulary vocab;
  RateStats rate_stats;
  double lambda = 100.0;
  int step = 0;
  ModelParams params;
  AdamState opt;
};

// Directory layout: meta.json (configs, vocabulary, rate statistics, lambda,
// step) plus tensors.bin (named float32 tensors, little-endian).
void save_checkpoint(const Checkpoint& ckpt, const std::string& dir);
Checkpoint load_checkpoint(const std::string& dir);

struct FitResult {
  Checkpoint checkpoint;
  std::vector<StepResult> history;
};

// Precomputes features and rate statistics, then optimizes for max_steps.
// With a non-empty out_dir, writes train_log.csv, periodic checkpoints in
// step_<N>/, and the final checkpoint in final/.
FitResult fit(const Dataset& train_set, const ModelConfig& model_cfg,
              const FeatureConfig& feature_cfg, const TrainConfig& train_cfg,
              const std::string& out_dir);

}  // namespace sctts
