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

#include "model.hpp"

#include <cmath>
#include <set>

#include "corpus.hpp"

namespace sctts {

void ModelConfig::validate() const {
  if (vocab_size < 2) fail(ErrorCode::kInvalidArgument, "vocab_size must be >= 2");
  if (embed_dim < 1 || hidden_dim < 1 || mel_bins < 1)
    fail(ErrorCode::kInvalidArgument, "network widths must be positive");
  if (coarse_factor != 4)
    fail(ErrorCode::kInvalidArgument, "coarse_factor must be 4 (two x2 stages)");
  if (dropout < 0.0 || dropout >= 1.0)
    fail(ErrorCode::kInvalidArgument, "dropout must lie in [0, 1)");
  if (postnet_dilations.size() != 2)
    fail(ErrorCode::kInvalidArgument, "postnet needs exactly two highway blocks");
  const auto check_dil = [](const std::vector<int>& v, const char* what) {
    for (int d : v) {
      if (d < 1) fail(ErrorCode::kInvalidArgument, std::string(what) + ": dilation must be >= 1");
    }
  };
  check_dil(text_dilations, "text stack");
  check_dil(audio_dilations, "audio stack");
  check_dil(decoder_dilations, "decoder stack");
  check_dil(postnet_dilations, "postnet stack");
  if (use_gst) {
    if (num_tokens < 1) fail(ErrorCode::kInvalidArgument, "need at least one style token");
    if (num_heads < 1) fail(ErrorCode::kInvalidArgument, "need at least one attention head");
    if (style_dim < 1 || style_dim % num_heads != 0)
      fail(ErrorCode::kInvalidArgument, "style_dim must be a positive multiple of num_heads");
    if (ref_channels.size() != 6)
      fail(ErrorCode::kInvalidArgument, "reference encoder takes exactly six convolutions");
    for (int c : ref_channels) {
      if (c < 1) fail(ErrorCode::kInvalidArgument, "reference channels must be positive");
    }
    if (ref_rnn_dim < 1) fail(ErrorCode::kInvalidArgument, "ref_rnn_dim must be positive");
  }
}

int ModelConfig::ref_flat_dim() const {
  int f = mel_bins;
  for (int i = 0; i < 6; ++i) f = (f + 1) / 2;
  return f * ref_channels.back();
}

Vocabulary Vocabulary::build(const std::vector<std::string>& texts) {
  std::set<std::string> uniq;
  for (const std::string& t : texts) {
    for (const std::string& tok : tokenize_text(t)) uniq.insert(tok);
  }
  Vocabulary v;
  for (const std::string& tok : uniq) {
    v.token_to_id[tok] = static_cast<int>(v.id_to_token.size());
    v.id_to_token.push_back(tok);
  }
  return v;
}

std::vector<int> Vocabulary::encode(const std::string& text) const {
  std::vector<int> ids;
  for (const std::string& tok : tokenize_text(text)) {
    const auto it = token_to_id.find(tok);
    if (it == token_to_id.end()) fail(ErrorCode::kDomain, "unknown token: " + tok);
    ids.push_back(it->second);
  }
  if (ids.empty()) fail(ErrorCode::kDomain, "empty phoneme sequence");
  return ids;
}

namespace {

ConvParams make_conv(int k, int cin, int cout, std::mt19937_64& rng) {
  ConvParams c;
  c.w = glorot_uniform(k * cin, cout, k * cin, cout, rng);
  c.b = Tensor::zeros(1, cout);
  return c;
}

// Highway block: conv to twice the width, first half gates, second half
// proposes. Zero conv weights give 0.5 * x, not the identity.
Var highway(Graph& g, Var x, const ConvParams& c, int width, int dilation,
            bool causal, double dropout, std::mt19937_64* rng) {
  Var h = g.conv1d(x, g.param(&c.w), g.param(&c.b), 3, dilation, causal);
  Var gate = g.sigmoid(g.slice_cols(h, 0, width));
  Var cand = g.slice_cols(h, width, 2 * width);
  Var keep = g.affine(gate, -1.0, 1.0);
  Var out = g.add(g.cmul(gate, cand), g.cmul(keep, x));
  return g.dropout(out, dropout, rng);
}

Var conv1x1(Graph& g, Var x, const ConvParams& c) {
  return g.conv1d(x, g.param(&c.w), g.param(&c.b), 1, 1, true);
}

}  // namespace

ModelParams init_params(const ModelConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  const int e = cfg.embed_dim;
  const int d = cfg.hidden_dim;
  const int m = cfg.mel_bins;

  ModelParams p;
  p.embedding = glorot_uniform(cfg.vocab_size, e, cfg.vocab_size, e, rng);

  p.text_in1 = make_conv(1, e + 1, 2 * d, rng);
  p.text_in2 = make_conv(1, 2 * d, 2 * d, rng);
  for (size_t i = 0; i < cfg.text_dilations.size(); ++i) {
    p.text_hw.push_back(make_conv(3, 2 * d, 4 * d, rng));
  }

  p.audio_in1 = make_conv(1, m, d, rng);
  p.audio_in2 = make_conv(1, d, d, rng);
  for (size_t i = 0; i < cfg.audio_dilations.size(); ++i) {
    p.audio_hw.push_back(make_conv(3, d, 2 * d, rng));
  }

  p.dec_in = make_conv(1, 2 * d, d, rng);
  for (size_t i = 0; i < cfg.decoder_dilations.size(); ++i) {
    p.dec_hw.push_back(make_conv(3, d, 2 * d, rng));
  }
  p.dec_out1 = make_conv(1, d, d, rng);
  p.dec_out2 = make_conv(1, d, m, rng);

  p.post_in = make_conv(1, m, d, rng);
  p.post_up1 = make_conv(2, d, d, rng);
  p.post_hw1 = make_conv(3, d, 2 * d, rng);
  p.post_up2 = make_conv(2, d, d, rng);
  p.post_hw2 = make_conv(3, d, 2 * d, rng);
  p.post_out1 = make_conv(1, d, d, rng);
  p.post_out2 = make_conv(1, d, m, rng);

  if (cfg.use_gst) {
    const int s = cfg.style_dim;
    p.gst_bank = glorot_uniform(cfg.num_tokens, s, cfg.num_tokens, s, rng);
    p.gst_wq = glorot_uniform(s, s, s, s, rng);
    p.gst_wk = glorot_uniform(s, s, s, s, rng);
    p.gst_wv = glorot_uniform(s, s, s, s, rng);
    int cin = 1;
    for (int cout : cfg.ref_channels) {
      ConvParams c;
      c.w = glorot_uniform(9 * cin, cout, 9 * cin, cout, rng);
      c.b = Tensor::zeros(1, cout);
      p.ref_conv.push_back(std::move(c));
      cin = cout;
    }
    const int flat = cfg.ref_flat_dim();
    p.ref_wih = glorot_uniform(flat, cfg.ref_rnn_dim, flat, cfg.ref_rnn_dim, rng);
    p.ref_whh = glorot_uniform(cfg.ref_rnn_dim, cfg.ref_rnn_dim, cfg.ref_rnn_dim,
                               cfg.ref_rnn_dim, rng);
    p.ref_brnn = Tensor::zeros(1, cfg.ref_rnn_dim);
    p.ref_proj.w = glorot_uniform(cfg.ref_rnn_dim, s, cfg.ref_rnn_dim, s, rng);
    p.ref_proj.b = Tensor::zeros(1, s);
    p.fuse.w = glorot_uniform(2 * d + s, 2 * d, 2 * d + s, 2 * d, rng);
    p.fuse.b = Tensor::zeros(1, 2 * d);
  }
  return p;
}

std::vector<std::pair<std::string, Tensor*>> bind_params(ModelParams& p,
                                                         const ModelConfig& cfg) {
  std::vector<std::pair<std::string, Tensor*>> out;
  const auto add = [&](const std::string& name, Tensor& t) {
    out.emplace_back(name, &t);
  };
  const auto add_conv = [&](const std::string& name, ConvParams& c) {
    add(name + ".w", c.w);
    add(name + ".b", c.b);
  };

  add("embedding", p.embedding);
  add_conv("text.in1", p.text_in1);
  add_conv("text.in2", p.text_in2);
  for (size_t i = 0; i < p.text_hw.size(); ++i) {
    add_conv("text.hw" + std::to_string(i), p.text_hw[i]);
  }
  add_conv("audio.in1", p.audio_in1);
  add_conv("audio.in2", p.audio_in2);
  for (size_t i = 0; i < p.audio_hw.size(); ++i) {
    add_conv("audio.hw" + std::to_string(i), p.audio_hw[i]);
  }
  add_conv("dec.in", p.dec_in);
  for (size_t i = 0; i < p.dec_hw.size(); ++i) {
    add_conv("dec.hw" + std::to_string(i), p.dec_hw[i]);
  }
  add_conv("dec.out1", p.dec_out1);
  add_conv("dec.out2", p.dec_out2);
  add_conv("post.in", p.post_in);
  add_conv("post.up1", p.post_up1);
  add_conv("post.hw1", p.post_hw1);
  add_conv("post.up2", p.post_up2);
  add_conv("post.hw2", p.post_hw2);
  add_conv("post.out1", p.post_out1);
  add_conv("post.out2", p.post_out2);
  if (cfg.use_gst) {
    add("gst.bank", p.gst_bank);
    add("gst.wq", p.gst_wq);
    add("gst.wk", p.gst_wk);
    add("gst.wv", p.gst_wv);
    for (size_t i = 0; i < p.ref_conv.size(); ++i) {
      add_conv("gst.ref" + std::to_string(i), p.ref_conv[i]);
    }
    add("gst.rnn.wih", p.ref_wih);
    add("gst.rnn.whh", p.ref_whh);
    add("gst.rnn.b", p.ref_brnn);
    add_conv("gst.proj", p.ref_proj);
    add_conv("gst.fuse", p.fuse);
  }
  return out;
}

Var condition_on_sr(Graph& g, Var embeddings, double r, const RateStats& stats) {
  if (stats.std_r <= 0.0)
    fail(ErrorCode::kInvalidArgument, "degenerate rate statistics: zero spread");
  const double z = (r - stats.mean_r) / stats.std_r;
  const int rows = g.val(embeddings).rows;
  return g.concat_cols(embeddings, g.input(Tensor::full(rows, 1, z)));
}

TextEncoding text_encode(Graph& g, Var conditioned, const ModelParams& p,
                         const ModelConfig& cfg, std::mt19937_64* rng) {
  const int d = cfg.hidden_dim;
  Var x = g.relu(conv1x1(g, conditioned, p.text_in1));
  x = conv1x1(g, x, p.text_in2);
  for (size_t i = 0; i < p.text_hw.size(); ++i) {
    x = highway(g, x, p.text_hw[i], 2 * d, cfg.text_dilations[i], false,
                cfg.dropout, rng);
  }
  return TextEncoding{g.slice_cols(x, 0, d), g.slice_cols(x, d, 2 * d)};
}

Var audio_encode(Graph& g, Var coarse, const ModelParams& p,
                 const ModelConfig& cfg, std::mt19937_64* rng) {
  const int d = cfg.hidden_dim;
  Var x = g.relu(conv1x1(g, coarse, p.audio_in1));
  x = conv1x1(g, x, p.audio_in2);
  for (size_t i = 0; i < p.audio_hw.size(); ++i) {
    x = highway(g, x, p.audio_hw[i], d, cfg.audio_dilations[i], true,
                cfg.dropout, rng);
  }
  return x;
}

AttendResult attend(Graph& g, Var q, Var k, Var v) {
  const int d = g.val(q).cols;
  if (g.val(k).cols != d)
    fail(ErrorCode::kInvalidArgument, "query and key widths differ");
  Var scores = g.affine(g.matmul_nt(q, k), 1.0 / std::sqrt(static_cast<double>(d)), 0.0);
  Var a = g.softmax_rows(scores);
  return AttendResult{g.matmul(a, v), a};
}

Var decode(Graph& g, Var context_plus_q, const ModelParams& p,
           const ModelConfig& cfg, std::mt19937_64* rng) {
  const int d = cfg.hidden_dim;
  Var x = conv1x1(g, context_plus_q, p.dec_in);
  for (size_t i = 0; i < p.dec_hw.size(); ++i) {
    x = highway(g, x, p.dec_hw[i], d, cfg.decoder_dilations[i], true,
                cfg.dropout, rng);
  }
  x = g.relu(conv1x1(g, x, p.dec_out1));
  return g.sigmoid(conv1x1(g, x, p.dec_out2));
}

Var postnet(Graph& g, Var coarse, const ModelParams& p, const ModelConfig& cfg,
            std::mt19937_64* rng) {
  const int d = cfg.hidden_dim;
  Var x = conv1x1(g, coarse, p.post_in);
  x = g.upsample_conv_x2(x, g.param(&p.post_up1.w), g.param(&p.post_up1.b));
  x = highway(g, x, p.post_hw1, d, cfg.postnet_dilations[0], false, cfg.dropout, rng);
  x = g.upsample_conv_x2(x, g.param(&p.post_up2.w), g.param(&p.post_up2.b));
  x = highway(g, x, p.post_hw2, d, cfg.postnet_dilations[1], false, cfg.dropout, rng);
  x = g.relu(conv1x1(g, x, p.post_out1));
  return g.sigmoid(conv1x1(g, x, p.post_out2));
}

Var gst_reference_encode(Graph& g, Var reference_mel, const ModelParams& p,
                         const ModelConfig& cfg) {
  Var x = reference_mel;
  int f = cfg.mel_bins;
  int cin = 1;
  for (size_t i = 0; i < p.ref_conv.size(); ++i) {
    const int cout = cfg.ref_channels[i];
    // tanh keeps the whole chain smooth and bounded; zero params map to zero.
    x = g.tanh(g.conv2d_s2(x, g.param(&p.ref_conv[i].w), g.param(&p.ref_conv[i].b),
                           f, cin, cout));
    f = (f + 1) / 2;
    cin = cout;
  }
  const int rows = g.val(x).rows;
  Var wih = g.param(&p.ref_wih);
  Var whh = g.param(&p.ref_whh);
  Var brnn = g.param(&p.ref_brnn);
  Var h = g.input(Tensor::zeros(1, cfg.ref_rnn_dim));
  for (int t = 0; t < rows; ++t) {
    Var row = g.slice_rows(x, t, t + 1);
    h = g.tanh(g.add(g.add(g.matmul(row, wih), g.matmul(h, whh)), brnn));
  }
  return g.add(g.matmul(h, g.param(&p.ref_proj.w)), g.param(&p.ref_proj.b));
}

namespace {

// Shared tail of both style paths: weights (num_heads x num_tokens, one row
// per head) against per-head slices of the projected token values.
Var style_from_weight_rows(Graph& g, const std::vector<Var>& weight_rows,
                           Var values, const ModelConfig& cfg) {
  const int head_dim = cfg.style_dim / cfg.num_heads;
  Var style;
  for (int hidx = 0; hidx < cfg.num_heads; ++hidx) {
    Var vi = g.slice_cols(values, hidx * head_dim, (hidx + 1) * head_dim);
    Var si = g.matmul(weight_rows[hidx], vi);
    style = hidx == 0 ? si : g.concat_cols(style, si);
  }
  return style;
}

}  // namespace

StyleResult gst_style_embedding(Graph& g, Var ref_embedding, const ModelParams& p,
                                const ModelConfig& cfg) {
  const int head_dim = cfg.style_dim / cfg.num_heads;
  Var bank = g.tanh(g.param(&p.gst_bank));
  Var keys = g.matmul(bank, g.param(&p.gst_wk));
  Var values = g.matmul(bank, g.param(&p.gst_wv));
  Var query = g.matmul(ref_embedding, g.param(&p.gst_wq));

  std::vector<Var> rows;
  Tensor weights(cfg.num_heads, cfg.num_tokens);
  for (int hidx = 0; hidx < cfg.num_heads; ++hidx) {
    Var qi = g.slice_cols(query, hidx * head_dim, (hidx + 1) * head_dim);
    Var ki = g.slice_cols(keys, hidx * head_dim, (hidx + 1) * head_dim);
    Var sc = g.affine(g.matmul_nt(qi, ki),
                      1.0 / std::sqrt(static_cast<double>(head_dim)), 0.0);
    Var wi = g.softmax_rows(sc);
    rows.push_back(wi);
    for (int t = 0; t < cfg.num_tokens; ++t) weights.at(hidx, t) = g.val(wi).at(0, t);
  }
  return StyleResult{style_from_weight_rows(g, rows, values, cfg), std::move(weights)};
}

Var gst_style_from_weights(Graph& g, const Tensor& weights, const ModelParams& p,
                           const ModelConfig& cfg) {
  if (weights.rows != cfg.num_heads || weights.cols != cfg.num_tokens)
    fail(ErrorCode::kInvalidArgument, "style weights must be num_heads x num_tokens");
  Var bank = g.tanh(g.param(&p.gst_bank));
  Var values = g.matmul(bank, g.param(&p.gst_wv));
  Var w = g.input(weights);
  std::vector<Var> rows;
  for (int hidx = 0; hidx < cfg.num_heads; ++hidx) {
    rows.push_back(g.slice_rows(w, hidx, hidx + 1));
  }
  return style_from_weight_rows(g, rows, values, cfg);
}

FusedText fuse_style(Graph& g, Var keys, Var values, Var style,
                     const ModelParams& p, const ModelConfig& cfg) {
  const int d = cfg.hidden_dim;
  const int rows = g.val(keys).rows;
  Var kv = g.concat_cols(keys, values);
  Var tiled = g.matmul(g.input(Tensor::full(rows, 1, 1.0)), style);
  Var fused = g.add_row(g.matmul(g.concat_cols(kv, tiled), g.param(&p.fuse.w)),
                        g.param(&p.fuse.b));
  return FusedText{g.slice_cols(fused, 0, d), g.slice_cols(fused, d, 2 * d)};
}

T2MOutput forward_t2m(Graph& g, const std::vector<int>& phonemes, double r,
                      const RateStats& stats, Var coarse_teacher,
                      const Tensor* reference_mel, const ModelParams& p,
                      const ModelConfig& cfg, std::mt19937_64* rng) {
  if (cfg.use_gst && reference_mel == nullptr)
    fail(ErrorCode::kInvalidArgument, "style reference required when use_gst is set");

  Var emb = g.embed(g.param(&p.embedding), phonemes);
  Var cond = condition_on_sr(g, emb, r, stats);
  TextEncoding te = text_encode(g, cond, p, cfg, rng);

  T2MOutput out;
  if (cfg.use_gst) {
    Var ref = gst_reference_encode(g, g.input(*reference_mel), p, cfg);
    StyleResult style = gst_style_embedding(g, ref, p, cfg);
    FusedText fused = fuse_style(g, te.keys, te.values, style.style, p, cfg);
    te.keys = fused.keys;
    te.values = fused.values;
    out.style_weights = std::move(style.weights);
  }

  Var q = audio_encode(g, coarse_teacher, p, cfg, rng);
  AttendResult att = attend(g, q, te.keys, te.values);
  Var dec_in = g.concat_cols(att.context, q);
  out.coarse = decode(g, dec_in, p, cfg, rng);
  out.mel = postnet(g, out.coarse, p, cfg, rng);
  out.attention = att.attention;
  return out;
}

}  // namespace sctts
