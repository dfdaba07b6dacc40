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

#include "config.hpp"

#include <set>
#include <string>

#include "json.hpp"

namespace sctts {

using nlohmann::json;

namespace {

// Applies known keys through setters and rejects everything else by name.
class SectionReader {
 public:
  SectionReader(const json& j, std::string section) : section_(std::move(section)) {
    if (!j.is_object())
      fail(ErrorCode::kParse, "config section '" + section_ + "' must be an object");
    obj_ = &j;
  }

  template <typename T>
  void field(const char* key, T& target) {
    handled_.insert(key);
    const auto it = obj_->find(key);
    if (it == obj_->end()) return;
    try {
      target = it->get<T>();
    } catch (const json::exception&) {
      fail(ErrorCode::kParse, "config key '" + section_ + "." + key +
                                  "' has the wrong type");
    }
  }

  void finish() const {
    for (const auto& [key, value] : obj_->items()) {
      if (!handled_.count(key))
        fail(ErrorCode::kParse,
             "unknown config key '" + section_ + "." + key + "'");
    }
  }

 private:
  const json* obj_ = nullptr;
  std::string section_;
  std::set<std::string> handled_;
};

void read_features(const json& j, FeatureConfig& f) {
  SectionReader r(j, "features");
  r.field("sample_rate", f.sample_rate);
  r.field("fft_size", f.fft_size);
  r.field("hop", f.hop);
  r.field("window", f.window);
  r.field("mel_bins", f.mel_bins);
  r.field("fmin", f.fmin);
  r.field("fmax", f.fmax);
  r.field("floor_db", f.floor_db);
  r.field("coarse_factor", f.coarse_factor);
  r.field("silence_threshold", f.silence_threshold);
  r.field("griffin_lim_iters", f.griffin_lim_iters);
  r.finish();
}

void read_model(const json& j, ModelConfig& m) {
  SectionReader r(j, "model");
  r.field("embed_dim", m.embed_dim);
  r.field("hidden_dim", m.hidden_dim);
  r.field("dropout", m.dropout);
  r.field("text_dilations", m.text_dilations);
  r.field("audio_dilations", m.audio_dilations);
  r.field("decoder_dilations", m.decoder_dilations);
  r.field("postnet_dilations", m.postnet_dilations);
  r.field("use_gst", m.use_gst);
  r.field("num_tokens", m.num_tokens);
  r.field("num_heads", m.num_heads);
  r.field("style_dim", m.style_dim);
  r.field("ref_channels", m.ref_channels);
  r.field("ref_rnn_dim", m.ref_rnn_dim);
  r.finish();
}

void read_train(const json& j, TrainConfig& t) {
  SectionReader r(j, "train");
  r.field("alpha_hold_steps", t.alpha_hold_steps);
  r.field("alpha_zero_step", t.alpha_zero_step);
  r.field("scale", t.scale);
  r.field("learning_rate", t.learning_rate);
  r.field("adam_beta1", t.adam_beta1);
  r.field("adam_beta2", t.adam_beta2);
  r.field("adam_eps", t.adam_eps);
  r.field("batch_size", t.batch_size);
  r.field("max_steps", t.max_steps);
  r.field("seed", t.seed);
  r.field("checkpoint_every", t.checkpoint_every);
  r.finish();
}

void read_corpus(const json& j, SynthConfig& c) {
  SectionReader r(j, "corpus");
  r.field("num_utterances", c.num_utterances);
  r.field("inventory_size", c.inventory_size);
  r.field("min_tokens", c.min_tokens);
  r.field("max_tokens", c.max_tokens);
  r.field("base_token_duration", c.base_token_duration);
  r.field("speed_lo", c.speed_lo);
  r.field("speed_hi", c.speed_hi);
  r.field("pitch_base", c.pitch_base);
  r.field("pitch_speed_correlation", c.pitch_speed_correlation);
  r.field("seed", c.seed);
  r.finish();
}

}  // namespace

AppConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::kParse, "config root must be an object");

  AppConfig cfg;
  const std::set<std::string> known{"features", "model", "train",
                                    "rate",     "corpus", "paths"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key))
      fail(ErrorCode::kParse, "unknown config key '" + key + "'");
  }

  if (doc.contains("features")) read_features(doc["features"], cfg.features);
  if (doc.contains("model")) read_model(doc["model"], cfg.model);
  if (doc.contains("train")) read_train(doc["train"], cfg.train);
  if (doc.contains("corpus")) read_corpus(doc["corpus"], cfg.corpus);
  if (doc.contains("rate")) {
    SectionReader r(doc["rate"], "rate");
    r.field("lambda", cfg.lambda);
    r.finish();
  }
  if (doc.contains("paths")) {
    SectionReader r(doc["paths"], "paths");
    r.field("work_dir", cfg.work_dir);
    r.field("manifest", cfg.manifest);
    r.finish();
  }

  if (cfg.lambda <= 0) fail(ErrorCode::kParse, "rate.lambda must be positive");
  cfg.train.lambda = cfg.lambda;
  return cfg;
}

std::string default_config_json() {
  const AppConfig d;
  json doc{
      {"features",
       {{"sample_rate", d.features.sample_rate},
        {"fft_size", d.features.fft_size},
        {"hop", d.features.hop},
        {"window", d.features.window},
        {"mel_bins", d.features.mel_bins},
        {"fmin", d.features.fmin},
        {"fmax", d.features.fmax},
        {"floor_db", d.features.floor_db},
        {"coarse_factor", d.features.coarse_factor},
        {"silence_threshold", d.features.silence_threshold},
        {"griffin_lim_iters", d.features.griffin_lim_iters}}},
      {"model",
       {{"embed_dim", d.model.embed_dim},
        {"hidden_dim", d.model.hidden_dim},
        {"dropout", d.model.dropout},
        {"text_dilations", d.model.text_dilations},
        {"audio_dilations", d.model.audio_dilations},
        {"decoder_dilations", d.model.decoder_dilations},
        {"postnet_dilations", d.model.postnet_dilations},
        {"use_gst", d.model.use_gst},
        {"num_tokens", d.model.num_tokens},
        {"num_heads", d.model.num_heads},
        {"style_dim", d.model.style_dim},
        {"ref_channels", d.model.ref_channels},
        {"ref_rnn_dim", d.model.ref_rnn_dim}}},
      {"train",
       {{"alpha_hold_steps", d.train.alpha_hold_steps},
        {"alpha_zero_step", d.train.alpha_zero_step},
        {"scale", d.train.scale},
        {"learning_rate", d.train.learning_rate},
        {"adam_beta1", d.train.adam_beta1},
        {"adam_beta2", d.train.adam_beta2},
        {"adam_eps", d.train.adam_eps},
        {"batch_size", d.train.batch_size},
        {"max_steps", d.train.max_steps},
        {"seed", d.train.seed},
        {"checkpoint_every", d.train.checkpoint_every}}},
      {"rate", {{"lambda", d.lambda}}},
      {"corpus",
       {{"num_utterances", d.corpus.num_utterances},
        {"inventory_size", d.corpus.inventory_size},
        {"min_tokens", d.corpus.min_tokens},
        {"max_tokens", d.corpus.max_tokens},
        {"base_token_duration", d.corpus.base_token_duration},
        {"speed_lo", d.corpus.speed_lo},
        {"speed_hi", d.corpus.speed_hi},
        {"pitch_base", d.corpus.pitch_base},
        {"pitch_speed_correlation", d.corpus.pitch_speed_correlation},
        {"seed", d.corpus.seed}}},
      {"paths", {{"work_dir", d.work_dir}, {"manifest", d.manifest}}}};
  return doc.dump(2) + "\n";
}

}  // namespace sctts
