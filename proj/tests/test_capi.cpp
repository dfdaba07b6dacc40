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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dsp.hpp"
#include "json.hpp"
#include "sctts/sctts.h"
#include "wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("sctts_capi_" + tag + "_" +
                                        std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(bool(in));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

int token_count(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  int n = 0;
  while (in >> tok) ++n;
  return n;
}

// One tiny end-to-end workspace shared by the cases below: synthetic corpus,
// extracted features, and a briefly trained model, all through the C API.
struct Workspace {
  TempDir root{"ws"};
  std::string config;
  std::string corpus_dir, manifest, feat_dir, train_dir, ckpt_dir;
  std::vector<std::string> ids, texts;
  sctts_status corpus_st = SCTTS_INTERNAL_ERROR;
  sctts_status feat_st = SCTTS_INTERNAL_ERROR;
  sctts_status train_st = SCTTS_INTERNAL_ERROR;
};

Workspace& ws() {
  static Workspace w;
  static const bool built = [] {
    w.config = R"({
      "features": {"fft_size": 512, "window": 512, "hop": 128,
                   "mel_bins": 20, "griffin_lim_iters": 4},
      "model": {"embed_dim": 8, "hidden_dim": 16, "dropout": 0.05,
                "text_dilations": [1], "audio_dilations": [1],
                "decoder_dilations": [1], "postnet_dilations": [1, 1]},
      "train": {"max_steps": 10, "batch_size": 2, "seed": 7},
      "corpus": {"num_utterances": 6, "inventory_size": 4, "min_tokens": 2,
                 "max_tokens": 4, "base_token_duration": 6, "seed": 77}
    })";
    w.corpus_dir = (w.root.path / "corpus").string();
    w.feat_dir = (w.root.path / "feat").string();
    w.train_dir = (w.root.path / "train").string();
    w.manifest = w.corpus_dir + "/manifest.jsonl";
    w.ckpt_dir = w.train_dir + "/final";

    w.corpus_st = sctts_corpus_synth(w.config.c_str(), w.corpus_dir.c_str());
    if (w.corpus_st == SCTTS_OK) {
      for (const std::string& line : read_lines(w.manifest)) {
        const json rec = json::parse(line);
        w.ids.push_back(rec.at("id").get<std::string>());
        w.texts.push_back(rec.at("text").get<std::string>());
      }
      w.feat_st = sctts_extract_features(w.config.c_str(), w.manifest.c_str(),
                                         w.feat_dir.c_str());
      w.train_st = sctts_train(w.config.c_str(), w.manifest.c_str(),
                               w.train_dir.c_str());
    }
    return true;
  }();
  (void)built;
  return w;
}

struct Model {
  sctts_model* p = nullptr;
  sctts_status st;
  explicit Model(const std::string& dir) { st = sctts_model_load(dir.c_str(), &p); }
  ~Model() { sctts_model_free(p); }
};

}  // namespace

TEST_CASE("version and error strings are always valid pointers") {
  REQUIRE(sctts_version() != nullptr);
  CHECK(std::string(sctts_version()).find('.') != std::string::npos);
  CHECK(sctts_last_error() != nullptr);
}

TEST_CASE("the default config is valid JSON and respects the buffer") {
  char buf[8192];
  REQUIRE(sctts_default_config(buf, sizeof buf) == SCTTS_OK);
  const json doc = json::parse(std::string(buf));
  for (const char* key : {"features", "model", "train", "rate", "corpus", "paths"})
    CHECK(doc.contains(key));
  CHECK(doc["rate"]["lambda"].get<double>() == 100.0);

  char tiny[8];
  CHECK(sctts_default_config(tiny, sizeof tiny) == SCTTS_INVALID_ARGUMENT);
  CHECK(std::string(sctts_last_error()).find("buffer") != std::string::npos);
  CHECK(sctts_default_config(nullptr, 0) == SCTTS_INVALID_ARGUMENT);
}

TEST_CASE("the pipeline runs end to end through the c api") {
  REQUIRE(ws().corpus_st == SCTTS_OK);
  REQUIRE(ws().feat_st == SCTTS_OK);
  REQUIRE(ws().train_st == SCTTS_OK);
  CHECK(ws().ids.size() == 6);
  CHECK(fs::exists(ws().manifest));
  for (const std::string& id : ws().ids)
    CHECK(fs::exists(fs::path(ws().corpus_dir) / (id + ".wav")));
}

TEST_CASE("corpus synthesis rejects bad arguments") {
  TempDir dir("corpus_err");
  CHECK(sctts_corpus_synth(nullptr, dir.path.c_str()) == SCTTS_INVALID_ARGUMENT);
  CHECK(sctts_corpus_synth("{}", nullptr) == SCTTS_INVALID_ARGUMENT);
  CHECK(sctts_corpus_synth("{ nope", dir.path.c_str()) == SCTTS_PARSE_ERROR);
  CHECK(sctts_corpus_synth(R"({"corpse": {}})", dir.path.c_str()) ==
        SCTTS_PARSE_ERROR);
  CHECK(std::string(sctts_last_error()).find("corpse") != std::string::npos);
}

TEST_CASE("feature extraction writes one mel per utterance") {
  REQUIRE(ws().feat_st == SCTTS_OK);
  for (const std::string& id : ws().ids) {
    const std::string path = (fs::path(ws().feat_dir) / (id + ".mel")).string();
    REQUIRE(fs::exists(path));
    const sctts::Tensor mel = sctts::read_mel(path);
    CHECK(mel.cols == 20);
    CHECK(mel.rows > 0);
  }
  CHECK(sctts_extract_features(ws().config.c_str(), "/nonexistent/manifest.jsonl",
                               ws().feat_dir.c_str()) == SCTTS_IO_ERROR);
}

TEST_CASE("a trained model loads and reports accurate info") {
  REQUIRE(ws().train_st == SCTTS_OK);
  Model m(ws().ckpt_dir);
  REQUIRE(m.st == SCTTS_OK);
  REQUIRE(m.p != nullptr);

  char buf[1024];
  REQUIRE(sctts_model_info(m.p, buf, sizeof buf) == SCTTS_OK);
  const json info = json::parse(std::string(buf));
  CHECK(info["mean_r"].get<double>() > 0.0);
  CHECK(info["n"].get<int>() == 6);
  CHECK(info["lambda"].get<double>() == 100.0);
  CHECK(info["step"].get<int>() == 10);
  CHECK(info["use_gst"].get<bool>() == false);
  CHECK(info["mel_bins"].get<int>() == 20);
  CHECK(info["sample_rate"].get<int>() == 22050);

  std::set<std::string> distinct;
  for (const std::string& text : ws().texts) {
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) distinct.insert(tok);
  }
  CHECK(info["vocab_size"].get<size_t>() == distinct.size());

  char tiny[4];
  CHECK(sctts_model_info(m.p, tiny, sizeof tiny) == SCTTS_INVALID_ARGUMENT);
  CHECK(sctts_model_info(nullptr, buf, sizeof buf) == SCTTS_INVALID_ARGUMENT);
}

TEST_CASE("model loading fails cleanly and freeing null is safe") {
  sctts_model* out = reinterpret_cast<sctts_model*>(0x1);
  CHECK(sctts_model_load("/nonexistent/ckpt", &out) == SCTTS_IO_ERROR);
  CHECK(out == nullptr);
  CHECK(sctts_model_load(nullptr, &out) == SCTTS_INVALID_ARGUMENT);
  CHECK(sctts_model_load("/nonexistent/ckpt", nullptr) == SCTTS_INVALID_ARGUMENT);
  sctts_model_free(nullptr);
}

TEST_CASE("synthesis writes wav, mel, and attention dumps") {
  REQUIRE(ws().train_st == SCTTS_OK);
  Model m(ws().ckpt_dir);
  REQUIRE(m.st == SCTTS_OK);
  TempDir dir("synth");
  const std::string wav_path = (dir.path / "out.wav").string();
  const std::string mel_path = (dir.path / "out.mel").string();
  const std::string att_path = (dir.path / "att.csv").string();

  const json req{{"text", ws().texts[0]}, {"length_scale", 1.0}};
  REQUIRE(sctts_synthesize(m.p, req.dump().c_str(), wav_path.c_str(),
                           mel_path.c_str(), att_path.c_str()) == SCTTS_OK);

  const sctts::WavData wav = sctts::read_wav(wav_path);
  CHECK(wav.sample_rate == 22050);
  CHECK(!wav.samples.empty());
  const sctts::Tensor mel = sctts::read_mel(mel_path);
  CHECK(mel.cols == 20);
  CHECK(mel.rows > 0);

  const std::vector<std::string> att = read_lines(att_path);
  REQUIRE(!att.empty());
  const int cols = 1 + static_cast<int>(
      std::count(att[0].begin(), att[0].end(), ','));
  CHECK(cols == token_count(ws().texts[0]));

  // The dumps are optional; the wav path is not.
  const std::string wav2 = (dir.path / "only.wav").string();
  CHECK(sctts_synthesize(m.p, req.dump().c_str(), wav2.c_str(), nullptr,
                         nullptr) == SCTTS_OK);
  CHECK(fs::exists(wav2));
}

TEST_CASE("synthesis rejects malformed requests with named errors") {
  REQUIRE(ws().train_st == SCTTS_OK);
  Model m(ws().ckpt_dir);
  REQUIRE(m.st == SCTTS_OK);
  TempDir dir("synth_err");
  const std::string wav_path = (dir.path / "out.wav").string();

  CHECK(sctts_synthesize(nullptr, "{}", wav_path.c_str(), nullptr, nullptr) ==
        SCTTS_INVALID_ARGUMENT);
  CHECK(sctts_synthesize(m.p, nullptr, wav_path.c_str(), nullptr, nullptr) ==
        SCTTS_INVALID_ARGUMENT);
  CHECK(sctts_synthesize(m.p, "{}", wav_path.c_str(), nullptr, nullptr) ==
        SCTTS_PARSE_ERROR);

  const json unknown{{"text", ws().texts[0]}, {"bogus", 1}};
  CHECK(sctts_synthesize(m.p, unknown.dump().c_str(), wav_path.c_str(), nullptr,
                         nullptr) == SCTTS_PARSE_ERROR);
  CHECK(std::string(sctts_last_error()).find("bogus") != std::string::npos);

  const json oov{{"text", "zz qq"}};
  CHECK(sctts_synthesize(m.p, oov.dump().c_str(), wav_path.c_str(), nullptr,
                         nullptr) == SCTTS_DOMAIN_ERROR);

  const json conflict{{"text", ws().texts[0]}, {"sr", 20.0}, {"length_scale", 1.2}};
  CHECK(sctts_synthesize(m.p, conflict.dump().c_str(), wav_path.c_str(), nullptr,
                         nullptr) == SCTTS_INVALID_ARGUMENT);
  CHECK(std::string(sctts_last_error()).size() > 0);

  // A successful call clears the thread-local error.
  char buf[1024];
  REQUIRE(sctts_model_info(m.p, buf, sizeof buf) == SCTTS_OK);
  CHECK(std::string(sctts_last_error()).empty());
}

TEST_CASE("scatter analysis writes a csv and fills the summary") {
  REQUIRE(ws().corpus_st == SCTTS_OK);
  TempDir dir("scatter");
  const std::string csv = (dir.path / "scatter.csv").string();
  char summary[1024];
  REQUIRE(sctts_analyze_scatter(ws().config.c_str(), ws().manifest.c_str(),
                                csv.c_str(), summary, sizeof summary) ==
          SCTTS_OK);
  const std::vector<std::string> lines = read_lines(csv);
  REQUIRE(!lines.empty());
  CHECK(lines[0] == "utt_id,sr,mean_f0");
  const json sum = json::parse(std::string(summary));
  CHECK(sum["rows"].get<size_t>() == 6);
  CHECK(sum["skipped"].is_array());
  CHECK(sum["skipped"].empty());
  CHECK(lines.size() == 1 + sum["rows"].get<size_t>());

  // The summary buffer is optional.
  const std::string csv2 = (dir.path / "scatter2.csv").string();
  CHECK(sctts_analyze_scatter(ws().config.c_str(), ws().manifest.c_str(),
                              csv2.c_str(), nullptr, 0) == SCTTS_OK);
}

TEST_CASE("length analysis reports per-text monotone flags") {
  REQUIRE(ws().train_st == SCTTS_OK);
  Model m(ws().ckpt_dir);
  REQUIRE(m.st == SCTTS_OK);
  TempDir dir("length");
  const std::string csv = (dir.path / "length.csv").string();
  char summary[1024];

  const json params{{"texts", {ws().texts[0], ws().texts[1]}}};
  REQUIRE(sctts_analyze_length(m.p, params.dump().c_str(), csv.c_str(), summary,
                               sizeof summary) == SCTTS_OK);
  const std::vector<std::string> lines = read_lines(csv);
  REQUIRE(!lines.empty());
  CHECK(lines[0] == "text_id,requested_r,achieved_r,rel_error");
  CHECK(lines.size() == 1 + 2 * 3);  // two texts, three default scales
  const json sum = json::parse(std::string(summary));
  CHECK(sum["texts"].get<int>() == 2);
  CHECK(sum["monotone_texts"].get<int>() >= 0);
  CHECK(sum["monotone_texts"].get<int>() <= 2);

  const json empty{{"texts", json::array()}};
  CHECK(sctts_analyze_length(m.p, empty.dump().c_str(), csv.c_str(), nullptr,
                             0) == SCTTS_PARSE_ERROR);
  const json unknown{{"texts", {ws().texts[0]}}, {"scales", {1.0}}};
  CHECK(sctts_analyze_length(m.p, unknown.dump().c_str(), csv.c_str(), nullptr,
                             0) == SCTTS_PARSE_ERROR);
  const json bad_scale{{"texts", {ws().texts[0]}}, {"length_scales", {-1.0}}};
  CHECK(sctts_analyze_length(m.p, bad_scale.dump().c_str(), csv.c_str(), nullptr,
                             0) != SCTTS_OK);
  CHECK(sctts_analyze_length(nullptr, params.dump().c_str(), csv.c_str(),
                             nullptr, 0) == SCTTS_INVALID_ARGUMENT);
}

TEST_CASE("f0 analysis is deterministic for a fixed model") {
  REQUIRE(ws().train_st == SCTTS_OK);
  Model m(ws().ckpt_dir);
  REQUIRE(m.st == SCTTS_OK);
  char buf[1024];
  REQUIRE(sctts_model_info(m.p, buf, sizeof buf) == SCTTS_OK);
  const double mean_r = json::parse(std::string(buf))["mean_r"].get<double>();

  TempDir dir("f0sr");
  const std::string csv1 = (dir.path / "a.csv").string();
  const std::string csv2 = (dir.path / "b.csv").string();
  const json params{{"texts", {ws().texts[0]}},
                    {"grid", {0.9 * mean_r, 1.1 * mean_r}}};
  const sctts_status st1 =
      sctts_analyze_f0sr(m.p, params.dump().c_str(), csv1.c_str());
  const sctts_status st2 =
      sctts_analyze_f0sr(m.p, params.dump().c_str(), csv2.c_str());
  CHECK(st1 == st2);
  if (st1 == SCTTS_OK) {
    const std::vector<std::string> lines = read_lines(csv1);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "sr,mean_f0,ci95,n");
    CHECK(slurp(csv1) == slurp(csv2));
  } else {
    // A barely trained model may produce unvoiced output at some rate; that
    // is a domain error, reported as such, and stable across runs.
    CHECK(st1 == SCTTS_DOMAIN_ERROR);
    CHECK(std::string(sctts_last_error()).find("voiced") != std::string::npos);
  }
}

TEST_CASE("f0 analysis rejects malformed parameters") {
  REQUIRE(ws().train_st == SCTTS_OK);
  Model m(ws().ckpt_dir);
  REQUIRE(m.st == SCTTS_OK);
  TempDir dir("f0sr_err");
  const std::string csv = (dir.path / "c.csv").string();

  CHECK(sctts_analyze_f0sr(m.p, "{}", csv.c_str()) == SCTTS_PARSE_ERROR);
  const json empty{{"texts", json::array()}};
  CHECK(sctts_analyze_f0sr(m.p, empty.dump().c_str(), csv.c_str()) ==
        SCTTS_PARSE_ERROR);
  const json unknown{{"texts", {ws().texts[0]}}, {"rates", {1.0}}};
  CHECK(sctts_analyze_f0sr(m.p, unknown.dump().c_str(), csv.c_str()) ==
        SCTTS_PARSE_ERROR);
  const json negative{{"texts", {ws().texts[0]}}, {"grid", {-3.0}}};
  CHECK(sctts_analyze_f0sr(m.p, negative.dump().c_str(), csv.c_str()) !=
        SCTTS_OK);
  CHECK(sctts_analyze_f0sr(nullptr, "{}", csv.c_str()) ==
        SCTTS_INVALID_ARGUMENT);
  CHECK(sctts_analyze_f0sr(m.p, nullptr, csv.c_str()) ==
        SCTTS_INVALID_ARGUMENT);
}
