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

#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "graph.hpp"
#include "rate.hpp"
#include "tensor.hpp"

namespace sctts {

// Network hyperparameters. Defaults follow the full-scale design; desk-scale
// runs shrink the widths and dilation lists through the same knobs.
struct ModelConfig {
  int vocab_size = 0;  // set from the vocabulary before init
  int embed_dim = 128;
  int hidden_dim = 256;
  int mel_bins = 80;
  int coarse_factor = 4;  // fixed: the upsampler has exactly two x2 stages
  double dropout = 0.05;

  // Highway convolution blocks, kernel 3, one entry per block.
  std::vector<int> text_dilations{1, 3, 9, 27, 1, 1};
  std::vector<int> audio_dilations{1, 3, 9, 27, 1, 1};
  std::vector<int> decoder_dilations{1, 3, 9, 1};
  std::vector<int> postnet_dilations{1, 3};  // one block after each x2 stage

  // Style encoder (enabled by use_gst).
  bool use_gst = false;
  int num_tokens = 10;
  int num_heads = 4;
  int style_dim = 128;
  std::vector<int> ref_channels{32, 32, 64, 64, 128, 128};
  int ref_rnn_dim = 128;

  void validate() const;
  // Flattened row width of the reference encoder output after the conv
  // stack collapses the frequency axis: ceil^6(mel_bins/2) * last channels.
  int ref_flat_dim() const;
};

// Token inventory built from training texts; ids are dense and sorted.
struct Vocabulary {
  std::vector<std::string> id_to_token;
  std::map<std::string, int> token_to_id;

  static Vocabulary build(const std::vector<std::string>& texts);
  std::vector<int> encode(const std::string& text) const;  // kDomain on OOV
  int size() const { return static_cast<int>(id_to_token.size()); }
};

struct ConvParams {
  Tensor w, b;
};

// All trainable tensors. Shapes are fixed by ModelConfig; see init_params.
struct ModelParams {
  Tensor embedding;  // vocab x e

  ConvParams text_in1, text_in2;
  std::vector<ConvParams> text_hw;

  ConvParams audio_in1, audio_in2;
  std::vector<ConvParams> audio_hw;

  ConvParams dec_in;
  std::vector<ConvParams> dec_hw;
  ConvParams dec_out1, dec_out2;

  ConvParams post_in;
  ConvParams post_up1, post_up2;
  ConvParams post_hw1, post_hw2;
  ConvParams post_out1, post_out2;

  // Style path; allocated only when use_gst.
  Tensor gst_bank;              // num_tokens x style_dim
  Tensor gst_wq, gst_wk, gst_wv;  // style_dim x style_dim
  std::vector<ConvParams> ref_conv;
  Tensor ref_wih, ref_whh, ref_brnn;
  ConvParams ref_proj;
  ConvParams fuse;
};

ModelParams init_params(const ModelConfig& cfg, std::mt19937_64& rng);

// Deterministic (name, tensor) enumeration for the optimizer and the
// checkpoint writer. Includes style tensors only when use_gst.
std::vector<std::pair<std::string, Tensor*>> bind_params(ModelParams& p,
                                                         const ModelConfig& cfg);

// Appends the standardized rate (r - mean)/std as a constant column.
Var condition_on_sr(Graph& g, Var embeddings, double r, const RateStats& stats);

struct TextEncoding {
  Var keys, values;  // each P x d
};

// Non-causal entry convolutions plus a highway stack; output split into
// attention keys and values. rng == nullptr disables dropout (eval mode).
TextEncoding text_encode(Graph& g, Var conditioned, const ModelParams& p,
                         const ModelConfig& cfg, std::mt19937_64* rng);

// Causal stack over the shifted coarse spectrogram; row t sees frames <= t.
Var audio_encode(Graph& g, Var coarse, const ModelParams& p,
                 const ModelConfig& cfg, std::mt19937_64* rng);

struct AttendResult {
  Var context;    // T_c x d
  Var attention;  // T_c x P, rows sum to 1
};

// Scaled dot-product attention; the scale is 1/sqrt(key width).
AttendResult attend(Graph& g, Var q, Var k, Var v);

// Causal stack ending in a sigmoid; input is [context, q] side by side.
Var decode(Graph& g, Var context_plus_q, const ModelParams& p,
           const ModelConfig& cfg, std::mt19937_64* rng);

// Two x2 upsampling stages with highway blocks; maps T_c x mel_bins to
// (coarse_factor * T_c) x mel_bins through a sigmoid.
Var postnet(Graph& g, Var coarse, const ModelParams& p, const ModelConfig& cfg,
            std::mt19937_64* rng);

// Six stride-2 3x3 convolutions over time x frequency, a tanh recurrence
// over the remaining rows, and a linear projection of the final state.
Var gst_reference_encode(Graph& g, Var reference_mel, const ModelParams& p,
                         const ModelConfig& cfg);

struct StyleResult {
  Var style;       // 1 x style_dim
  Tensor weights;  // num_heads x num_tokens snapshot, each row sums to 1
};

// Multi-head attention of the reference embedding over the tanh token bank.
StyleResult gst_style_embedding(Graph& g, Var ref_embedding, const ModelParams& p,
                                const ModelConfig& cfg);

// Style from caller-chosen token weights (num_heads x num_tokens), the
// direct-control path that bypasses the reference encoder.
Var gst_style_from_weights(Graph& g, const Tensor& weights, const ModelParams& p,
                           const ModelConfig& cfg);

struct FusedText {
  Var keys, values;
};

// Broadcasts the style vector over the sequence, concatenates it with
// [keys, values], and projects back to the original widths.
FusedText fuse_style(Graph& g, Var keys, Var values, Var style,
                     const ModelParams& p, const ModelConfig& cfg);

struct T2MOutput {
  Var coarse;     // T_c x mel_bins in (0,1)
  Var mel;        // (T_c * factor) x mel_bins in (0,1)
  Var attention;  // T_c x P
  Tensor style_weights;  // empty unless use_gst
};

// Full teacher-forced pass. coarse_teacher is the ground-truth coarse
// spectrogram shifted right one frame with a zero first frame. A style
// reference is required exactly when use_gst; ignored otherwise.
T2MOutput forward_t2m(Graph& g, const std::vector<int>& phonemes, double r,
                      const RateStats& stats, Var coarse_teacher,
                      const Tensor* reference_mel, const ModelParams& p,
                      const ModelConfig& cfg, std::mt19937_64* rng);

}  // namespace sctts
