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

#include "corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "wav.hpp"

namespace sctts {

namespace fs = std::filesystem;
using nlohmann::json;

void SynthConfig::validate() const {
  if (num_utterances < 1) fail(ErrorCode::kInvalidArgument, "num_utterances must be >= 1");
  if (inventory_size < 2) fail(ErrorCode::kInvalidArgument, "inventory_size must be >= 2");
  if (min_tokens < 1 || max_tokens < min_tokens)
    fail(ErrorCode::kInvalidArgument, "need 1 <= min_tokens <= max_tokens");
  if (base_token_duration < 2)
    fail(ErrorCode::kInvalidArgument, "base_token_duration must be >= 2");
  if (speed_lo <= 0 || speed_hi < speed_lo)
    fail(ErrorCode::kInvalidArgument, "need 0 < speed_lo <= speed_hi");
  if (pitch_base <= 0) fail(ErrorCode::kInvalidArgument, "pitch_base must be positive");
  if (pitch_speed_correlation < -1.0 || pitch_speed_correlation > 1.0)
    fail(ErrorCode::kInvalidArgument, "pitch_speed_correlation must lie in [-1, 1]");
}

double synthetic_token_offset(int token, int inventory_size) {
  return kTokenPitchSpreadHz *
         (2.0 * token / (inventory_size - 1) - 1.0);
}

double synthetic_speed_pitch_shift(double speed, const SynthConfig& cfg) {
  if (cfg.speed_hi == cfg.speed_lo) return 0.0;
  const double unit = (speed - cfg.speed_lo) / (cfg.speed_hi - cfg.speed_lo);
  return kSpeedPitchSwingHz * (2.0 * unit - 1.0);
}

SyntheticCorpus generate_synthetic_corpus(const SynthConfig& cfg,
                                          const FeatureConfig& feat) {
  cfg.validate();
  feat.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> token_count(cfg.min_tokens, cfg.max_tokens);
  std::uniform_int_distribution<int> token_pick(0, cfg.inventory_size - 1);
  std::uniform_int_distribution<int> silence(kLeadSilenceMinFrames, kLeadSilenceMaxFrames);
  std::uniform_real_distribution<double> speed_pick(cfg.speed_lo, cfg.speed_hi);
  std::normal_distribution<double> pitch_noise(0.0, kPitchNoiseStdHz);

  SyntheticCorpus out;
  out.dataset.sample_rate = feat.sample_rate;
  out.dataset.utterances.reserve(cfg.num_utterances);
  out.waves.reserve(cfg.num_utterances);

  const int hop = feat.hop;
  for (int u = 0; u < cfg.num_utterances; ++u) {
    const int n_tokens = token_count(rng);
    std::vector<int> tokens(n_tokens);
    for (int& t : tokens) t = token_pick(rng);
    const double speed = speed_pick(rng);
    const double pitch_offset =
        cfg.pitch_speed_correlation * synthetic_speed_pitch_shift(speed, cfg) +
        pitch_noise(rng);
    const int lead = silence(rng);
    const int trail = silence(rng);
    const int dur = std::max(1, static_cast<int>(std::lround(cfg.base_token_duration / speed)));

    int total_frames = lead + trail + n_tokens * dur;
    std::vector<double> wave(static_cast<size_t>(total_frames) * hop, 0.0);

    // Phase-continuous harmonic synthesis so token changes do not click.
    double phase[3] = {0.0, 0.0, 0.0};
    size_t pos = static_cast<size_t>(lead) * hop;
    for (int tok : tokens) {
      const double f0 = cfg.pitch_base + synthetic_token_offset(tok, cfg.inventory_size) +
                        pitch_offset;
      for (int i = 0; i < dur * hop; ++i) {
        double s = 0.0;
        for (int h = 0; h < 3; ++h) {
          s += kHarmonicAmps[h] * std::sin(phase[h]);
          phase[h] += 2.0 * std::numbers::pi * (h + 1) * f0 / feat.sample_rate;
        }
        wave[pos++] = 0.45 * s;
      }
      for (double& p : phase) p = std::fmod(p, 2.0 * std::numbers::pi);
    }

    Utterance utt;
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "u%05d", u);
    utt.id = idbuf;
    std::string text;
    for (size_t i = 0; i < tokens.size(); ++i) {
      char sym[8];
      std::snprintf(sym, sizeof(sym), "p%02d", tokens[i]);
      if (i) text += ' ';
      text += sym;
    }
    utt.text = std::move(text);
    utt.meta = json{{"speed", speed},
                    {"pitch_offset_hz", pitch_offset},
                    {"durations", std::vector<int>(tokens.size(), dur)},
                    {"lead_silence", lead},
                    {"trail_silence", trail}};
    out.dataset.utterances.push_back(std::move(utt));
    out.waves.push_back(std::move(wave));
  }
  return out;
}

std::string write_corpus(SyntheticCorpus& corpus, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path base(dir);
  // The manifest stores paths relative to itself; the in-memory dataset gets
  // resolved paths so it is usable from any working directory.
  std::vector<std::string> rel_paths;
  for (size_t i = 0; i < corpus.dataset.utterances.size(); ++i) {
    Utterance& utt = corpus.dataset.utterances[i];
    const std::string rel = utt.id + ".wav";
    write_wav((base / rel).string(), corpus.waves[i], corpus.dataset.sample_rate);
    utt.audio_path = (base / rel).string();
    rel_paths.push_back(rel);
  }
  const std::string manifest = (base / "manifest.jsonl").string();
  std::ofstream out(manifest);
  if (!out) fail(ErrorCode::kIo, "cannot write manifest: " + manifest);
  for (size_t i = 0; i < corpus.dataset.utterances.size(); ++i) {
    const Utterance& utt = corpus.dataset.utterances[i];
    json rec{{"id", utt.id}, {"audio", rel_paths[i]}, {"text", utt.text}};
    if (!utt.meta.empty()) rec["meta"] = utt.meta;
    out << rec.dump() << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "short write: " + manifest);
  return manifest;
}

Dataset load_manifest(const std::string& path, int expected_sample_rate) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open manifest: " + path);
  const fs::path dir = fs::path(path).parent_path();

  Dataset d;
  d.sample_rate = expected_sample_rate;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      fail(ErrorCode::kParse,
           "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec.contains("audio") ||
        !rec.contains("text") || !rec["id"].is_string() || !rec["audio"].is_string() ||
        !rec["text"].is_string())
      fail(ErrorCode::kParse, "manifest line " + std::to_string(line_no) +
                                  ": need string fields id, audio, text");

    Utterance utt;
    utt.id = rec["id"].get<std::string>();
    utt.text = rec["text"].get<std::string>();
    if (utt.text.empty())
      fail(ErrorCode::kParse, "manifest line " + std::to_string(line_no) + ": empty text");
    if (!seen.insert(utt.id).second)
      fail(ErrorCode::kDomain, "duplicate utterance id: " + utt.id);
    if (rec.contains("meta")) utt.meta = rec["meta"];

    fs::path audio = rec["audio"].get<std::string>();
    if (audio.is_relative()) audio = dir / audio;
    utt.audio_path = audio.string();
    if (!fs::exists(audio))
      fail(ErrorCode::kIo, "missing audio file: " + utt.audio_path);
    WavData wav = read_wav(utt.audio_path);
    if (wav.sample_rate != expected_sample_rate)
      fail(ErrorCode::kDomain, "sample rate mismatch for " + utt.id + ": got " +
                                   std::to_string(wav.sample_rate) + ", want " +
                                   std::to_string(expected_sample_rate));
    d.utterances.push_back(std::move(utt));
  }
  if (d.utterances.empty()) fail(ErrorCode::kParse, "empty manifest: " + path);
  return d;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& d, double test_fraction,
                                          uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    fail(ErrorCode::kInvalidArgument, "test fraction must lie in (0, 1)");
  const size_t n = d.utterances.size();
  const auto n_test = static_cast<size_t>(
      std::max<long>(1, std::lround(test_fraction * static_cast<double>(n))));
  if (n_test >= n)
    fail(ErrorCode::kInvalidArgument, "dataset too small to split");

  // Partial Fisher-Yates; only the test prefix needs shuffling.
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < n_test; ++i) {
    std::uniform_int_distribution<size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::set<size_t> test_set(idx.begin(), idx.begin() + static_cast<long>(n_test));

  Dataset train, test;
  train.sample_rate = test.sample_rate = d.sample_rate;
  for (size_t i = 0; i < n; ++i) {
    (test_set.count(i) ? test : train).utterances.push_back(d.utterances[i]);
  }
  return {std::move(train), std::move(test)};
}

std::vector<std::string> tokenize_text(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

}  // namespace sctts
