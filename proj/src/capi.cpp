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

#include "sctts/sctts.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "config.hpp"
#include "corpus.hpp"
#include "dsp.hpp"
#include "eval.hpp"
#include "json.hpp"
#include "synth.hpp"
#include "train.hpp"
#include "wav.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sctts;

thread_local std::string g_last_error;

sctts_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return SCTTS_INVALID_ARGUMENT;
    case ErrorCode::kIo: return SCTTS_IO_ERROR;
    case ErrorCode::kParse: return SCTTS_PARSE_ERROR;
    case ErrorCode::kDomain: return SCTTS_DOMAIN_ERROR;
    case ErrorCode::kInternal: return SCTTS_INTERNAL_ERROR;
  }
  return SCTTS_INTERNAL_ERROR;
}

// Runs the body, translating exceptions into status codes and the
// thread-local message.
template <typename Fn>
sctts_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SCTTS_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SCTTS_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "unknown failure";
    return SCTTS_INTERNAL_ERROR;
  }
}

const char* require(const char* arg, const char* name) {
  if (arg == nullptr)
    fail(ErrorCode::kInvalidArgument, std::string(name) + " must not be null");
  return arg;
}

void copy_out(const std::string& text, char* out, size_t cap) {
  if (out == nullptr || cap == 0) return;
  const size_t n = std::min(text.size(), cap - 1);
  std::memcpy(out, text.data(), n);
  out[n] = '\0';
}

AppConfig load_config(const char* config_json) {
  return parse_config_json(require(config_json, "config_json"));
}

// Strict reader for small request/params documents.
json parse_object(const char* text, const char* what) {
  json doc;
  try {
    doc = json::parse(require(text, what));
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string(what) + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object())
    fail(ErrorCode::kParse, std::string(what) + " must be a JSON object");
  return doc;
}

void reject_unknown(const json& doc, const std::set<std::string>& known,
                    const char* what) {
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key))
      fail(ErrorCode::kParse,
           std::string("unknown ") + what + " key '" + key + "'");
  }
}

Tensor token_weights_of(const json& doc) {
  const auto& rows = doc.at("token_weights");
  if (!rows.is_array() || rows.empty())
    fail(ErrorCode::kParse, "token_weights must be a non-empty array of rows");
  const size_t cols = rows[0].is_array() ? rows[0].size() : 0;
  if (cols == 0) fail(ErrorCode::kParse, "token_weights rows must be arrays");
  Tensor t(static_cast<int>(rows.size()), static_cast<int>(cols));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != cols)
      fail(ErrorCode::kParse, "token_weights rows must have equal lengths");
    for (size_t j = 0; j < cols; ++j)
      t.at(static_cast<int>(i), static_cast<int>(j)) = rows[i][j].get<double>();
  }
  return t;
}

// Style and attention fields shared by synthesis and the analyses.
void read_style_fields(const json& doc, SynthesisRequest& req) {
  if (doc.contains("reference")) req.reference_path = doc["reference"].get<std::string>();
  if (doc.contains("token_weights")) req.token_weights = token_weights_of(doc);
  if (doc.contains("monotonic_attention"))
    req.monotonic_attention = doc["monotonic_attention"].get<bool>();
  if (doc.contains("max_frames_margin"))
    req.max_frames_margin = doc["max_frames_margin"].get<double>();
}

std::vector<std::string> texts_of(const json& doc) {
  const auto it = doc.find("texts");
  if (it == doc.end() || !it->is_array() || it->empty())
    fail(ErrorCode::kParse, "params need a non-empty 'texts' array");
  std::vector<std::string> texts;
  for (const auto& t : *it) texts.push_back(t.get<std::string>());
  return texts;
}

void write_attention_csv(const Tensor& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  out.precision(10);
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) out << (j ? "," : "") << a.at(i, j);
    out << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "short write: " + path);
}

}  // namespace

struct sctts_model {
  Checkpoint checkpoint;
};

extern "C" {

const char* sctts_version(void) { return "0.1.0"; }

const char* sctts_last_error(void) { return g_last_error.c_str(); }

sctts_status sctts_default_config(char* out, size_t cap) {
  return guarded([&] {
    if (out == nullptr) fail(ErrorCode::kInvalidArgument, "out must not be null");
    const std::string doc = default_config_json();
    if (cap <= doc.size())
      fail(ErrorCode::kInvalidArgument, "buffer too small for the config");
    copy_out(doc, out, cap);
  });
}

sctts_status sctts_corpus_synth(const char* config_json, const char* out_dir) {
  return guarded([&] {
    const AppConfig cfg = load_config(config_json);
    require(out_dir, "out_dir");
    cfg.corpus.validate();
    cfg.features.validate();
    SyntheticCorpus corpus = generate_synthetic_corpus(cfg.corpus, cfg.features);
    write_corpus(corpus, out_dir);
  });
}

sctts_status sctts_extract_features(const char* config_json,
                                    const char* manifest_path,
                                    const char* out_dir) {
  return guarded([&] {
    const AppConfig cfg = load_config(config_json);
    const Dataset ds = load_manifest(require(manifest_path, "manifest_path"),
                                     cfg.features.sample_rate);
    fs::create_directories(require(out_dir, "out_dir"));
    for (const Utterance& utt : ds.utterances) {
      const WavData wav = read_wav(utt.audio_path);
      const MelSpectrogram mel = mel_spectrogram(wav.samples, cfg.features);
      write_mel((fs::path(out_dir) / (utt.id + ".mel")).string(), mel.values);
    }
  });
}

sctts_status sctts_train(const char* config_json, const char* manifest_path,
                         const char* out_dir) {
  return guarded([&] {
    const AppConfig cfg = load_config(config_json);
    const Dataset ds = load_manifest(require(manifest_path, "manifest_path"),
                                     cfg.features.sample_rate);
    fit(ds, cfg.model, cfg.features, cfg.train, require(out_dir, "out_dir"));
  });
}

sctts_status sctts_model_load(const char* checkpoint_dir, sctts_model** out) {
  return guarded([&] {
    if (out == nullptr) fail(ErrorCode::kInvalidArgument, "out must not be null");
    *out = nullptr;
    auto model = std::make_unique<sctts_model>();
    model->checkpoint = load_checkpoint(require(checkpoint_dir, "checkpoint_dir"));
    *out = model.release();
  });
}

void sctts_model_free(sctts_model* model) { delete model; }

sctts_status sctts_model_info(const sctts_model* model, char* out, size_t cap) {
  return guarded([&] {
    if (model == nullptr) fail(ErrorCode::kInvalidArgument, "model must not be null");
    if (out == nullptr) fail(ErrorCode::kInvalidArgument, "out must not be null");
    const Checkpoint& ck = model->checkpoint;
    const json doc{{"mean_r", ck.rate_stats.mean_r},
                   {"std_r", ck.rate_stats.std_r},
                   {"n", ck.rate_stats.n},
                   {"lambda", ck.lambda},
                   {"step", ck.step},
                   {"use_gst", ck.model.use_gst},
                   {"vocab_size", ck.model.vocab_size},
                   {"mel_bins", ck.model.mel_bins},
                   {"sample_rate", ck.features.sample_rate}};
    const std::string text = doc.dump();
    if (cap <= text.size())
      fail(ErrorCode::kInvalidArgument, "buffer too small for the model info");
    copy_out(text, out, cap);
  });
}

sctts_status sctts_synthesize(const sctts_model* model, const char* request_json,
                              const char* wav_path, const char* mel_path,
                              const char* attention_csv_path) {
  return guarded([&] {
    if (model == nullptr) fail(ErrorCode::kInvalidArgument, "model must not be null");
    const json doc = parse_object(request_json, "request");
    reject_unknown(doc,
                   {"text", "sr", "length_scale", "reference", "token_weights",
                    "monotonic_attention", "max_frames_margin"},
                   "request");
    SynthesisRequest req;
    const auto text_it = doc.find("text");
    if (text_it == doc.end())
      fail(ErrorCode::kParse, "request needs a 'text' key");
    req.text = text_it->get<std::string>();
    if (doc.contains("sr")) req.sr = doc["sr"].get<double>();
    if (doc.contains("length_scale"))
      req.length_scale = doc["length_scale"].get<double>();
    read_style_fields(doc, req);

    const SynthesisResult res = synthesize(req, model->checkpoint);
    write_wav(require(wav_path, "wav_path"), res.wave,
              model->checkpoint.features.sample_rate);
    if (mel_path != nullptr) write_mel(mel_path, res.mel.values);
    if (attention_csv_path != nullptr)
      write_attention_csv(res.attention, attention_csv_path);
  });
}

sctts_status sctts_analyze_scatter(const char* config_json,
                                   const char* manifest_path,
                                   const char* out_csv, char* summary_out,
                                   size_t summary_cap) {
  return guarded([&] {
    const AppConfig cfg = load_config(config_json);
    const Dataset ds = load_manifest(require(manifest_path, "manifest_path"),
                                     cfg.features.sample_rate);
    const ScatterResult res = corpus_f0_sr_scatter(ds, cfg.features, cfg.lambda);
    write_scatter_csv(res, require(out_csv, "out_csv"));
    json summary{{"rows", res.rows.size()},
                 {"skipped", res.skipped},
                 {"pearson_r", res.pearson_r}};
    copy_out(summary.dump(), summary_out, summary_cap);
  });
}

sctts_status sctts_analyze_f0sr(const sctts_model* model,
                                const char* params_json, const char* out_csv) {
  return guarded([&] {
    if (model == nullptr) fail(ErrorCode::kInvalidArgument, "model must not be null");
    const json doc = parse_object(params_json, "params");
    reject_unknown(doc,
                   {"texts", "grid", "reference", "token_weights",
                    "monotonic_attention", "max_frames_margin"},
                   "params");
    const std::vector<std::string> texts = texts_of(doc);
    std::vector<double> grid;
    if (doc.contains("grid")) {
      grid = doc["grid"].get<std::vector<double>>();
    } else {
      for (double m : {0.6, 0.8, 1.0, 1.2, 1.4})
        grid.push_back(m * model->checkpoint.rate_stats.mean_r);
    }
    SynthesisRequest base;
    read_style_fields(doc, base);
    const std::vector<F0SRRow> rows =
        f0_sr_curve(checkpoint_synth_fn(model->checkpoint, base), texts, grid,
                    model->checkpoint.features);
    write_f0_sr_csv(rows, require(out_csv, "out_csv"));
  });
}

sctts_status sctts_analyze_length(const sctts_model* model,
                                  const char* params_json, const char* out_csv,
                                  char* summary_out, size_t summary_cap) {
  return guarded([&] {
    if (model == nullptr) fail(ErrorCode::kInvalidArgument, "model must not be null");
    const json doc = parse_object(params_json, "params");
    reject_unknown(doc,
                   {"texts", "length_scales", "reference", "token_weights",
                    "monotonic_attention", "max_frames_margin"},
                   "params");
    const std::vector<std::string> texts = texts_of(doc);
    std::vector<double> scales{0.7, 1.0, 1.5};
    if (doc.contains("length_scales"))
      scales = doc["length_scales"].get<std::vector<double>>();
    SynthesisRequest base;
    read_style_fields(doc, base);
    const Checkpoint& ck = model->checkpoint;
    const LengthControlReport rep = length_control_report(
        checkpoint_synth_fn(ck, base), texts, scales, ck.rate_stats, ck.lambda,
        ck.features);
    write_length_control_csv(rep, require(out_csv, "out_csv"));

    int monotone = 0;
    for (const auto& [id, ok] : rep.monotone) monotone += ok ? 1 : 0;
    std::vector<double> errors;
    for (const LengthControlRow& row : rep.rows)
      if (std::isfinite(row.rel_error)) errors.push_back(row.rel_error);
    std::sort(errors.begin(), errors.end());
    const double median =
        errors.empty()
            ? std::numeric_limits<double>::quiet_NaN()
            : (errors.size() % 2 ? errors[errors.size() / 2]
                                 : 0.5 * (errors[errors.size() / 2 - 1] +
                                          errors[errors.size() / 2]));
    json summary{{"texts", rep.monotone.size()},
                 {"monotone_texts", monotone},
                 {"median_rel_error", median}};
    copy_out(summary.dump(), summary_out, summary_cap);
  });
}

}  // extern "C"
