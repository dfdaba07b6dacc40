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

#include "synth.hpp"

#include <algorithm>
#include <cmath>

#include "model.hpp"
#include "wav.hpp"

namespace sctts {

double resolve_rate(const SynthesisRequest& req, const RateStats& stats) {
  if (req.sr < 0 || req.length_scale < 0)
    fail(ErrorCode::kInvalidArgument, "rate controls must be positive");
  if (req.sr > 0 && req.length_scale > 0)
    fail(ErrorCode::kInvalidArgument,
         "sr and length_scale are mutually exclusive");
  if (req.sr > 0) return req.sr;
  if (req.length_scale > 0) return length_scale_to_sr(stats, req.length_scale);
  return stats.mean_r;
}

std::vector<double> constrain_monotonic(const std::vector<double>& row,
                                        int prev_pos) {
  const int p = static_cast<int>(row.size());
  if (p < 1) fail(ErrorCode::kInvalidArgument, "empty attention row");
  if (prev_pos < 0 || prev_pos >= p)
    fail(ErrorCode::kInvalidArgument, "previous position out of range");
  const int lo = prev_pos;
  const int hi = std::min(prev_pos + 3, p - 1);

  std::vector<double> out(p, 0.0);
  double total = 0.0;
  for (int i = lo; i <= hi; ++i) total += row[i];
  if (total <= 0.0) {
    out[std::min(prev_pos + 1, p - 1)] = 1.0;
    return out;
  }
  for (int i = lo; i <= hi; ++i) out[i] = row[i] / total;
  return out;
}

int coarse_frame_cap(int num_phonemes, double r, double lambda, double margin,
                     int factor) {
  if (num_phonemes < 1 || r <= 0 || lambda <= 0 || margin <= 0 || factor < 1)
    fail(ErrorCode::kInvalidArgument, "bad frame cap inputs");
  const double full_frames = std::ceil(lambda * num_phonemes / r * margin);
  return static_cast<int>(std::ceil(full_frames / factor));
}

namespace {

int argmax(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::vector<double> tensor_row(const Tensor& t, int r) {
  std::vector<double> out(t.cols);
  for (int j = 0; j < t.cols; ++j) out[j] = t.at(r, j);
  return out;
}

// Text keys and values with any style fusion applied, snapshot as tensors so
// every decoding step can reuse them without re-encoding.
struct EncodedText {
  Tensor keys, values;
};

EncodedText encode_text_once(const SynthesisRequest& req, const Checkpoint& ckpt,
                             const std::vector<int>& phonemes, double r) {
  Graph g(false);
  Var emb = g.embed(g.param(&ckpt.params.embedding), phonemes);
  Var cond = condition_on_sr(g, emb, r, ckpt.rate_stats);
  TextEncoding te = text_encode(g, cond, ckpt.params, ckpt.model, nullptr);

  Var keys = te.keys;
  Var values = te.values;
  if (ckpt.model.use_gst) {
    Var style;
    if (req.token_weights.size() > 0) {
      const Tensor& w = req.token_weights;
      for (int i = 0; i < w.rows; ++i) {
        double sum = 0.0;
        for (int j = 0; j < w.cols; ++j) {
          if (w.at(i, j) < 0)
            fail(ErrorCode::kInvalidArgument, "token weights must be >= 0");
          sum += w.at(i, j);
        }
        if (std::abs(sum - 1.0) > 1e-6)
          fail(ErrorCode::kInvalidArgument, "token weight rows must sum to 1");
      }
      style = gst_style_from_weights(g, w, ckpt.params, ckpt.model);
    } else if (!req.reference_path.empty()) {
      const WavData wav = read_wav(req.reference_path);
      if (wav.sample_rate != ckpt.features.sample_rate)
        fail(ErrorCode::kDomain, "reference sample rate mismatch");
      const MelSpectrogram ref = mel_spectrogram(wav.samples, ckpt.features);
      Var ref_emb = gst_reference_encode(g, g.input(ref.values), ckpt.params,
                                         ckpt.model);
      style = gst_style_embedding(g, ref_emb, ckpt.params, ckpt.model).style;
    } else {
      fail(ErrorCode::kInvalidArgument,
           "style model needs a reference recording or token weights");
    }
    FusedText fused = fuse_style(g, keys, values, style, ckpt.params, ckpt.model);
    keys = fused.keys;
    values = fused.values;
  }
  return EncodedText{g.val(keys), g.val(values)};
}

}  // namespace

SynthesisResult synthesize(const SynthesisRequest& req, const Checkpoint& ckpt) {
  ckpt.model.validate();
  ckpt.features.validate();
  if (req.max_frames_margin <= 0)
    fail(ErrorCode::kInvalidArgument, "max_frames_margin must be positive");

  const std::vector<int> phonemes = ckpt.vocab.encode(req.text);
  const int p_count = static_cast<int>(phonemes.size());
  const double r = resolve_rate(req, ckpt.rate_stats);
  const int factor = ckpt.model.coarse_factor;
  const int bins = ckpt.model.mel_bins;
  const int cap = coarse_frame_cap(p_count, r, ckpt.lambda,
                                   req.max_frames_margin, factor);

  const EncodedText text = encode_text_once(req, ckpt, phonemes, r);

  SynthesisResult res;
  res.resolved_r = r;

  Tensor frames(0, bins);        // generated coarse frames so far
  Tensor attention_used(0, 0);   // the adjusted rows fed to the decoder
  int silent_run = 0;
  bool stopped_on_silence = false;

  while (frames.rows < cap) {
    const int t = frames.rows;  // index of the frame being generated

    // Decoder input: zero frame, then every frame already generated.
    Tensor shifted = Tensor::zeros(t + 1, bins);
    for (int i = 1; i <= t; ++i)
      for (int j = 0; j < bins; ++j) shifted.at(i, j) = frames.at(i - 1, j);

    Graph g(false);
    Var q = audio_encode(g, g.input(shifted), ckpt.params, ckpt.model, nullptr);
    AttendResult att = attend(g, q, g.input(text.keys), g.input(text.values));

    Var context = att.context;
    Tensor rows_used = g.val(att.attention);
    if (req.monotonic_attention) {
      // Re-derive the whole constrained prefix; the rule is deterministic,
      // so earlier rows come out the same as in earlier steps.
      Tensor adjusted(t + 1, p_count);
      int prev = 0;
      for (int i = 0; i <= t; ++i) {
        const std::vector<double> row =
            constrain_monotonic(tensor_row(rows_used, i), prev);
        for (int j = 0; j < p_count; ++j) adjusted.at(i, j) = row[j];
        prev = argmax(row);
      }
      rows_used = adjusted;
      context = g.matmul(g.input(adjusted), g.input(text.values));
    }

    Var coarse_pred = decode(g, g.concat_cols(context, q), ckpt.params,
                             ckpt.model, nullptr);
    const Tensor& pred = g.val(coarse_pred);

    // Append the newest frame and its attention row.
    Tensor grown(t + 1, bins);
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < bins; ++j) grown.at(i, j) = frames.at(i, j);
    for (int j = 0; j < bins; ++j) grown.at(t, j) = pred.at(t, j);
    frames = std::move(grown);
    attention_used = rows_used;

    double mean = 0.0;
    for (int j = 0; j < bins; ++j) mean += frames.at(t, j);
    mean /= bins;
    if (mean < ckpt.features.silence_threshold) {
      if (++silent_run >= kSilenceRunFrames) {
        stopped_on_silence = true;
        break;
      }
    } else {
      silent_run = 0;
    }
  }
  res.hit_cap = !stopped_on_silence;

  Graph g(false);
  Var mel_var = postnet(g, g.input(frames), ckpt.params, ckpt.model, nullptr);
  res.mel.values = g.val(mel_var);
  res.mel.config = ckpt.features;
  res.coarse = std::move(frames);
  res.attention = std::move(attention_used);
  res.wave = griffin_lim(res.mel, ckpt.features);
  return res;
}

}  // namespace sctts
