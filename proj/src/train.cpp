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

#include "train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "json.hpp"
#include "wav.hpp"

namespace sctts {

namespace fs = std::filesystem;
using nlohmann::json;

void TrainConfig::validate() const {
  if (alpha_hold_steps <= 0 || alpha_zero_step <= alpha_hold_steps)
    fail(ErrorCode::kInvalidArgument, "need 0 < alpha_hold_steps < alpha_zero_step");
  if (scale <= 0) fail(ErrorCode::kInvalidArgument, "schedule scale must be positive");
  if (scaled_hold_steps() < 1 || scaled_zero_step() <= scaled_hold_steps())
    fail(ErrorCode::kInvalidArgument, "scaled schedule milestones collapsed");
  if (learning_rate <= 0) fail(ErrorCode::kInvalidArgument, "learning rate must be positive");
  if (adam_beta1 < 0 || adam_beta1 >= 1 || adam_beta2 < 0 || adam_beta2 >= 1)
    fail(ErrorCode::kInvalidArgument, "adam betas must lie in [0, 1)");
  if (adam_eps <= 0) fail(ErrorCode::kInvalidArgument, "adam eps must be positive");
  if (batch_size < 1) fail(ErrorCode::kInvalidArgument, "batch size must be >= 1");
  if (max_steps < 1) fail(ErrorCode::kInvalidArgument, "max_steps must be >= 1");
  if (checkpoint_every < 0)
    fail(ErrorCode::kInvalidArgument, "checkpoint_every must be >= 0");
  if (lambda <= 0) fail(ErrorCode::kInvalidArgument, "lambda must be positive");
}

int TrainConfig::scaled_hold_steps() const {
  return static_cast<int>(std::lround(alpha_hold_steps * scale));
}

int TrainConfig::scaled_zero_step() const {
  return static_cast<int>(std::lround(alpha_zero_step * scale));
}

double alpha_schedule(int step, const TrainConfig& cfg) {
  if (step < 0) fail(ErrorCode::kInvalidArgument, "step must be >= 0");
  const int hold = cfg.scaled_hold_steps();
  const int zero = cfg.scaled_zero_step();
  if (step <= hold) return 1.0;
  if (step >= zero) return 0.0;
  return static_cast<double>(zero - step) / static_cast<double>(zero - hold);
}

Var spectrogram_loss(Graph& g, Var pred, const Tensor& target) {
  const Tensor& tp = g.val(pred);
  if (tp.rows != target.rows || tp.cols != target.cols)
    fail(ErrorCode::kInvalidArgument, "loss shape mismatch");
  const double inv_n = 1.0 / target.size();
  Var l1 = g.sum_all(g.abs(g.sub(pred, g.input(target))));
  Var kl = g.sum_all(g.binary_kl(pred, target));
  return g.affine(g.add(l1, kl), inv_n, 0.0);
}

Var spectrogram_loss_masked(Graph& g, Var pred, const Tensor& target,
                            const Tensor& mask) {
  const Tensor& tp = g.val(pred);
  if (tp.rows != target.rows || tp.cols != target.cols ||
      tp.rows != mask.rows || tp.cols != mask.cols)
    fail(ErrorCode::kInvalidArgument, "loss shape mismatch");
  double count = 0.0;
  for (double v : mask.data) {
    if (v != 0.0 && v != 1.0) fail(ErrorCode::kInvalidArgument, "mask entries must be 0 or 1");
    count += v;
  }
  if (count == 0.0) fail(ErrorCode::kInvalidArgument, "mask excludes every entry");
  Var l1 = g.sum_all(g.mul_const(g.abs(g.sub(pred, g.input(target))), mask));
  Var kl = g.sum_all(g.mul_const(g.binary_kl(pred, target), mask));
  return g.affine(g.add(l1, kl), 1.0 / count, 0.0);
}

Var total_loss(Graph& g, Var coarse_pred, const Tensor& coarse_target,
               Var mel_pred, const Tensor& mel_target, const Tensor& mel_mask,
               double alpha) {
  if (alpha < 0) fail(ErrorCode::kInvalidArgument, "alpha must be >= 0");
  Var coarse = spectrogram_loss(g, coarse_pred, coarse_target);
  Var mel = spectrogram_loss_masked(g, mel_pred, mel_target, mel_mask);
  return g.add(g.affine(coarse, alpha, 0.0), mel);
}

void adam_apply(const std::vector<std::pair<std::string, Tensor*>>& params,
                const std::map<std::string, Tensor>& grads, AdamState& state,
                const TrainConfig& cfg) {
  state.t += 1;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (const auto& [name, p] : params) {
    const auto git = grads.find(name);
    if (git == grads.end()) fail(ErrorCode::kInternal, "missing gradient for " + name);
    const Tensor& grad = git->second;
    if (!grad.same_shape(*p)) fail(ErrorCode::kInternal, "gradient shape mismatch for " + name);
    Tensor& m = state.m.try_emplace(name, Tensor::zeros(p->rows, p->cols)).first->second;
    Tensor& v = state.v.try_emplace(name, Tensor::zeros(p->rows, p->cols)).first->second;
    for (size_t i = 0; i < p->data.size(); ++i) {
      const double gi = grad.data[i];
      m.data[i] = b1 * m.data[i] + (1.0 - b1) * gi;
      v.data[i] = b2 * v.data[i] + (1.0 - b2) * gi * gi;
      const double mhat = m.data[i] / bc1;
      const double vhat = v.data[i] / bc2;
      p->data[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    }
  }
}

PreparedUtterance prepare_utterance(const Utterance& utt, const Vocabulary& vocab,
                                    const FeatureConfig& fcfg, double lambda) {
  PreparedUtterance out;
  out.id = utt.id;
  out.phonemes = vocab.encode(utt.text);

  const WavData wav = read_wav(utt.audio_path);
  if (wav.sample_rate != fcfg.sample_rate)
    fail(ErrorCode::kDomain, "sample rate mismatch for " + utt.id);
  const MelSpectrogram mel = mel_spectrogram(wav.samples, fcfg);
  const CoarseMel coarse = coarsen(mel);
  out.mel = mel.values;
  out.coarse = coarse.values;

  const int tc = out.coarse.rows;
  const int bins = out.coarse.cols;
  out.teacher = Tensor::zeros(tc, bins);
  for (int t = 1; t < tc; ++t) {
    for (int j = 0; j < bins; ++j) out.teacher.at(t, j) = out.coarse.at(t - 1, j);
  }

  const int full = tc * coarse.factor;
  out.mel_pad = Tensor::zeros(full, bins);
  out.mel_mask = Tensor::zeros(full, bins);
  for (int t = 0; t < out.mel.rows; ++t) {
    for (int j = 0; j < bins; ++j) {
      out.mel_pad.at(t, j) = out.mel.at(t, j);
      out.mel_mask.at(t, j) = 1.0;
    }
  }

  const std::vector<bool> mask = voiced_mask(mel, fcfg.silence_threshold);
  const int voiced = static_cast<int>(std::count(mask.begin(), mask.end(), true));
  out.r = compute_sr(static_cast<int>(out.phonemes.size()), voiced, lambda).r;
  return out;
}

StepResult train_step(const std::vector<const PreparedUtterance*>& batch,
                      ModelParams& params, const ModelConfig& mcfg,
                      const RateStats& stats, AdamState& opt, int step,
                      const TrainConfig& tcfg, std::mt19937_64* dropout_rng) {
  if (batch.empty()) fail(ErrorCode::kInvalidArgument, "empty batch");

  StepResult res;
  res.step = step;
  res.alpha = alpha_schedule(step, tcfg);

  auto bound = bind_params(params, mcfg);
  std::map<std::string, Tensor> grads;
  for (const auto& [name, t] : bound) grads.emplace(name, Tensor::zeros(t->rows, t->cols));

  const double inv_b = 1.0 / batch.size();
  for (const PreparedUtterance* u : batch) {
    Graph g(true);
    const Tensor* reference = mcfg.use_gst ? &u->mel : nullptr;
    const T2MOutput out = forward_t2m(g, u->phonemes, u->r, stats,
                                      g.input(u->teacher), reference, params,
                                      mcfg, dropout_rng);
    Var coarse_l = spectrogram_loss(g, out.coarse, u->coarse);
    Var mel_l = spectrogram_loss_masked(g, out.mel, u->mel_pad, u->mel_mask);
    Var total = g.add(g.affine(coarse_l, res.alpha, 0.0), mel_l);

    const double lc = g.val(coarse_l).at(0, 0);
    const double lm = g.val(mel_l).at(0, 0);
    const double lt = g.val(total).at(0, 0);
    if (!std::isfinite(lt)) {
      std::string ids;
      for (const PreparedUtterance* b : batch) ids += " " + b->id;
      fail(ErrorCode::kDomain,
           "non-finite loss at step " + std::to_string(step) + "; batch:" + ids);
    }
    res.loss_coarse += lc * inv_b;
    res.loss_mel += lm * inv_b;
    res.total += lt * inv_b;

    g.backward(total);
    for (const auto& [name, t] : bound) {
      const Tensor gt = g.grad(g.param(t));
      Tensor& acc = grads.at(name);
      for (size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += gt.data[i] * inv_b;
    }
  }

  adam_apply(bound, grads, opt, tcfg);
  return res;
}

namespace {

json model_config_to_json(const ModelConfig& m) {
  return json{{"vocab_size", m.vocab_size},
              {"embed_dim", m.embed_dim},
              {"hidden_dim", m.hidden_dim},
              {"mel_bins", m.mel_bins},
              {"coarse_factor", m.coarse_factor},
              {"dropout", m.dropout},
              {"text_dilations", m.text_dilations},
              {"audio_dilations", m.audio_dilations},
              {"decoder_dilations", m.decoder_dilations},
              {"postnet_dilations", m.postnet_dilations},
              {"use_gst", m.use_gst},
              {"num_tokens", m.num_tokens},
              {"num_heads", m.num_heads},
              {"style_dim", m.style_dim},
              {"ref_channels", m.ref_channels},
              {"ref_rnn_dim", m.ref_rnn_dim}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig m;
  m.vocab_size = j.at("vocab_size").get<int>();
  m.embed_dim = j.at("embed_dim").get<int>();
  m.hidden_dim = j.at("hidden_dim").get<int>();
  m.mel_bins = j.at("mel_bins").get<int>();
  m.coarse_factor = j.at("coarse_factor").get<int>();
  m.dropout = j.at("dropout").get<double>();
  m.text_dilations = j.at("text_dilations").get<std::vector<int>>();
  m.audio_dilations = j.at("audio_dilations").get<std::vector<int>>();
  m.decoder_dilations = j.at("decoder_dilations").get<std::vector<int>>();
  m.postnet_dilations = j.at("postnet_dilations").get<std::vector<int>>();
  m.use_gst = j.at("use_gst").get<bool>();
  m.num_tokens = j.at("num_tokens").get<int>();
  m.num_heads = j.at("num_heads").get<int>();
  m.style_dim = j.at("style_dim").get<int>();
  m.ref_channels = j.at("ref_channels").get<std::vector<int>>();
  m.ref_rnn_dim = j.at("ref_rnn_dim").get<int>();
  return m;
}

json feature_config_to_json(const FeatureConfig& f) {
  return json{{"sample_rate", f.sample_rate},
              {"fft_size", f.fft_size},
              {"hop", f.hop},
              {"window", f.window},
              {"mel_bins", f.mel_bins},
              {"fmin", f.fmin},
              {"fmax", f.fmax},
              {"floor_db", f.floor_db},
              {"coarse_factor", f.coarse_factor},
              {"silence_threshold", f.silence_threshold},
              {"griffin_lim_iters", f.griffin_lim_iters}};
}

FeatureConfig feature_config_from_json(const json& j) {
  FeatureConfig f;
  f.sample_rate = j.at("sample_rate").get<int>();
  f.fft_size = j.at("fft_size").get<int>();
  f.hop = j.at("hop").get<int>();
  f.window = j.at("window").get<int>();
  f.mel_bins = j.at("mel_bins").get<int>();
  f.fmin = j.at("fmin").get<double>();
  f.fmax = j.at("fmax").get<double>();
  f.floor_db = j.at("floor_db").get<double>();
  f.coarse_factor = j.at("coarse_factor").get<int>();
  f.silence_threshold = j.at("silence_threshold").get<double>();
  f.griffin_lim_iters = j.at("griffin_lim_iters").get<int>();
  return f;
}

void write_u32(std::ofstream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void write_tensor_entry(std::ofstream& out, const std::string& name, const Tensor& t) {
  write_u32(out, static_cast<uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  write_u32(out, static_cast<uint32_t>(t.rows));
  write_u32(out, static_cast<uint32_t>(t.cols));
  std::vector<float> buf(t.data.begin(), t.data.end());
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

std::pair<std::string, Tensor> read_tensor_entry(std::ifstream& in) {
  const uint32_t name_len = read_u32(in);
  if (!in || name_len > 4096) fail(ErrorCode::kParse, "corrupt tensor entry name");
  std::string name(name_len, '\0');
  in.read(name.data(), name_len);
  const uint32_t rows = read_u32(in);
  const uint32_t cols = read_u32(in);
  if (!in || rows == 0 || cols == 0 || static_cast<uint64_t>(rows) * cols > (1u << 28))
    fail(ErrorCode::kParse, "corrupt tensor entry shape for " + name);
  Tensor t(static_cast<int>(rows), static_cast<int>(cols));
  std::vector<float> buf(t.data.size());
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!in) fail(ErrorCode::kParse, "truncated tensor data for " + name);
  std::copy(buf.begin(), buf.end(), t.data.begin());
  return {std::move(name), std::move(t)};
}

constexpr char kTensorMagic[4] = {'T', 'N', 'S', '0'};

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& dir) {
  fs::create_directories(dir);

  json meta{{"format", 1},
            {"step", ckpt.step},
            {"lambda", ckpt.lambda},
            {"rate_stats",
             {{"mean_r", ckpt.rate_stats.mean_r},
              {"std_r", ckpt.rate_stats.std_r},
              {"n", ckpt.rate_stats.n}}},
            {"model", model_config_to_json(ckpt.model)},
            {"features", feature_config_to_json(ckpt.features)},
            {"vocab", ckpt.vocab.id_to_token},
            {"adam_t", ckpt.opt.t}};
  std::ofstream mout(fs::path(dir) / "meta.json");
  if (!mout) fail(ErrorCode::kIo, "cannot write checkpoint metadata in " + dir);
  mout << meta.dump(2) << '\n';
  if (!mout) fail(ErrorCode::kIo, "short write of checkpoint metadata");
  mout.close();

  // The binder needs mutable access; serialization does not modify.
  auto bound = bind_params(const_cast<ModelParams&>(ckpt.params), ckpt.model);
  std::ofstream tout(fs::path(dir) / "tensors.bin", std::ios::binary);
  if (!tout) fail(ErrorCode::kIo, "cannot write tensors in " + dir);
  tout.write(kTensorMagic, 4);
  uint32_t count = static_cast<uint32_t>(bound.size());
  count += static_cast<uint32_t>(ckpt.opt.m.size() + ckpt.opt.v.size());
  write_u32(tout, count);
  for (const auto& [name, t] : bound) write_tensor_entry(tout, name, *t);
  for (const auto& [name, t] : ckpt.opt.m) write_tensor_entry(tout, "adam.m." + name, t);
  for (const auto& [name, t] : ckpt.opt.v) write_tensor_entry(tout, "adam.v." + name, t);
  if (!tout) fail(ErrorCode::kIo, "short write of tensors");
}

Checkpoint load_checkpoint(const std::string& dir) {
  std::ifstream min(fs::path(dir) / "meta.json");
  if (!min) fail(ErrorCode::kIo, "cannot open checkpoint metadata in " + dir);
  json meta;
  try {
    min >> meta;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("bad checkpoint metadata: ") + e.what());
  }

  Checkpoint ckpt;
  try {
    if (meta.at("format").get<int>() != 1)
      fail(ErrorCode::kParse, "unsupported checkpoint format");
    ckpt.step = meta.at("step").get<int>();
    ckpt.lambda = meta.at("lambda").get<double>();
    const json& rs = meta.at("rate_stats");
    ckpt.rate_stats.mean_r = rs.at("mean_r").get<double>();
    ckpt.rate_stats.std_r = rs.at("std_r").get<double>();
    ckpt.rate_stats.n = rs.at("n").get<int>();
    ckpt.model = model_config_from_json(meta.at("model"));
    ckpt.features = feature_config_from_json(meta.at("features"));
    ckpt.vocab.id_to_token = meta.at("vocab").get<std::vector<std::string>>();
    ckpt.opt.t = meta.at("adam_t").get<int64_t>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("bad checkpoint metadata: ") + e.what());
  }
  for (size_t i = 0; i < ckpt.vocab.id_to_token.size(); ++i) {
    ckpt.vocab.token_to_id[ckpt.vocab.id_to_token[i]] = static_cast<int>(i);
  }
  ckpt.model.validate();
  ckpt.features.validate();

  // Allocate parameter shapes, then overwrite each tensor from the file.
  std::mt19937_64 shape_rng(0);
  ckpt.params = init_params(ckpt.model, shape_rng);
  auto bound = bind_params(ckpt.params, ckpt.model);
  std::map<std::string, Tensor*> by_name;
  for (auto& [name, t] : bound) by_name[name] = t;

  std::ifstream tin(fs::path(dir) / "tensors.bin", std::ios::binary);
  if (!tin) fail(ErrorCode::kIo, "cannot open tensors in " + dir);
  char magic[4];
  tin.read(magic, 4);
  if (!tin || std::string(magic, 4) != std::string(kTensorMagic, 4))
    fail(ErrorCode::kParse, "bad tensor container magic");
  const uint32_t count = read_u32(tin);
  std::set<std::string> seen;
  for (uint32_t i = 0; i < count; ++i) {
    auto [name, t] = read_tensor_entry(tin);
    if (!seen.insert(name).second)
      fail(ErrorCode::kParse, "duplicate tensor entry: " + name);
    if (name.rfind("adam.m.", 0) == 0) {
      ckpt.opt.m.emplace(name.substr(7), std::move(t));
    } else if (name.rfind("adam.v.", 0) == 0) {
      ckpt.opt.v.emplace(name.substr(7), std::move(t));
    } else {
      const auto it = by_name.find(name);
      if (it == by_name.end()) fail(ErrorCode::kParse, "unknown tensor entry: " + name);
      if (!it->second->same_shape(t))
        fail(ErrorCode::kParse, "tensor shape mismatch for " + name);
      *it->second = std::move(t);
      by_name.erase(it);
    }
  }
  if (!by_name.empty())
    fail(ErrorCode::kParse, "checkpoint missing tensor: " + by_name.begin()->first);
  return ckpt;
}

FitResult fit(const Dataset& train_set, const ModelConfig& model_cfg,
              const FeatureConfig& feature_cfg, const TrainConfig& train_cfg,
              const std::string& out_dir) {
  if (train_set.utterances.empty()) fail(ErrorCode::kInvalidArgument, "empty dataset");
  feature_cfg.validate();
  train_cfg.validate();

  std::vector<std::string> texts;
  for (const Utterance& u : train_set.utterances) texts.push_back(u.text);
  const Vocabulary vocab = Vocabulary::build(texts);

  ModelConfig mcfg = model_cfg;
  mcfg.vocab_size = vocab.size();
  mcfg.mel_bins = feature_cfg.mel_bins;
  mcfg.coarse_factor = feature_cfg.coarse_factor;
  mcfg.validate();

  std::vector<PreparedUtterance> prepared;
  prepared.reserve(train_set.utterances.size());
  std::vector<SpeakingRate> rates;
  for (const Utterance& u : train_set.utterances) {
    prepared.push_back(prepare_utterance(u, vocab, feature_cfg, train_cfg.lambda));
    SpeakingRate sr;
    sr.r = prepared.back().r;
    sr.lambda = train_cfg.lambda;
    rates.push_back(sr);
  }
  const RateStats stats = average_sr(rates);
  if (stats.std_r <= 0.0)
    fail(ErrorCode::kDomain, "degenerate corpus: every utterance has the same rate");

  std::mt19937_64 rng(train_cfg.seed);
  ModelParams params = init_params(mcfg, rng);
  AdamState opt;

  // Epoch order: reshuffled deterministically as the cursor wraps.
  std::vector<size_t> order(prepared.size());
  std::iota(order.begin(), order.end(), 0);
  size_t cursor = order.size();  // forces a shuffle before the first batch

  std::ofstream log;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    log.open(fs::path(out_dir) / "train_log.csv");
    if (!log) fail(ErrorCode::kIo, "cannot write training log in " + out_dir);
    log << "step,alpha,loss_coarse,loss_mel,total\n";
  }

  FitResult result;
  result.history.reserve(train_cfg.max_steps);
  std::mt19937_64 dropout_rng(train_cfg.seed + 0x9e3779b97f4a7c15ull);
  for (int step = 0; step < train_cfg.max_steps; ++step) {
    std::vector<const PreparedUtterance*> batch;
    for (int b = 0; b < train_cfg.batch_size; ++b) {
      if (cursor >= order.size()) {
        for (size_t i = order.size(); i > 1; --i) {
          std::uniform_int_distribution<size_t> pick(0, i - 1);
          std::swap(order[i - 1], order[pick(rng)]);
        }
        cursor = 0;
      }
      batch.push_back(&prepared[order[cursor++]]);
    }

    const StepResult sr = train_step(batch, params, mcfg, stats, opt, step,
                                     train_cfg, &dropout_rng);
    result.history.push_back(sr);
    if (log) {
      log << sr.step << ',' << sr.alpha << ',' << sr.loss_coarse << ','
          << sr.loss_mel << ',' << sr.total << '\n';
    }

    const bool periodic = train_cfg.checkpoint_every > 0 &&
                          (step + 1) % train_cfg.checkpoint_every == 0;
    if (periodic && !out_dir.empty()) {
      Checkpoint ck{mcfg, feature_cfg, vocab, stats, train_cfg.lambda,
                    step + 1,  params,      opt};
      save_checkpoint(ck, (fs::path(out_dir) / ("step_" + std::to_string(step + 1))).string());
    }
  }

  result.checkpoint = Checkpoint{mcfg,  feature_cfg,       vocab,
                                 stats, train_cfg.lambda, train_cfg.max_steps,
                                 std::move(params),        std::move(opt)};
  if (!out_dir.empty()) {
    save_checkpoint(result.checkpoint, (fs::path(out_dir) / "final").string());
  }
  return result;
}

}  // namespace sctts
