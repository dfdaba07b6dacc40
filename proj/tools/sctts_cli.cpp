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

// Command-line front end over the C library. Subcommands cover the whole
// workflow: corpus generation, feature extraction, training, synthesis, and
// the three analyses. A JSON config file seeds every run; flags override
// individual config values (flags win). Exit codes: 0 success, 1 operation
// failure, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sctts/sctts.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// A missing config file is a usage problem; an unreadable one is IO.
std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int fail_op(const std::string& context) {
  std::cerr << "error: " << context << ": " << sctts_last_error() << "\n";
  return kExitFailure;
}

// Loads --config if given, otherwise starts from an empty document, then
// lays flag overrides on top.
class ConfigBuilder {
 public:
  void set_path(const std::string& path) { path_ = path; }

  template <typename T>
  void override_key(const std::string& section, const std::string& key,
                    const std::optional<T>& value) {
    if (value) overrides_.emplace_back([=](json& doc) { doc[section][key] = *value; });
  }

  std::string build() const {
    json doc = json::object();
    if (!path_.empty()) {
      try {
        doc = json::parse(read_file(path_));
      } catch (const json::exception& e) {
        throw std::runtime_error(path_ + " is not valid JSON: " + e.what());
      }
    }
    for (const auto& apply : overrides_) apply(doc);
    return doc.dump();
  }

 private:
  std::string path_;
  std::vector<std::function<void(json&)>> overrides_;
};

// Splits "12,16.5,20" into numbers; CLI-side so the C API sees clean JSON.
std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::runtime_error("bad number: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw std::runtime_error("empty number list");
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw std::runtime_error(path + " has no text lines");
  return lines;
}

// Shared synthesis-style flags: style reference, direct token weights,
// attention constraint, frame margin.
struct StyleFlags {
  std::string reference;
  std::string token_weights;  // JSON array of rows
  bool monotonic = false;
  std::optional<double> margin;

  void attach(CLI::App* cmd) {
    cmd->add_option("--reference", reference,
                    "Style reference WAV (style models)");
    cmd->add_option("--token-weights", token_weights,
                    "Style token weights as a JSON array of rows");
    cmd->add_flag("--monotonic", monotonic,
                  "Constrain attention to move monotonically");
    cmd->add_option("--margin", margin,
                    "Frame budget margin over the rate-implied length");
  }

  void apply(json& doc) const {
    if (!reference.empty()) doc["reference"] = reference;
    if (!token_weights.empty()) {
      try {
        doc["token_weights"] = json::parse(token_weights);
      } catch (const json::exception& e) {
        throw std::runtime_error(std::string("--token-weights is not valid JSON: ") +
                                 e.what());
      }
    }
    if (monotonic) doc["monotonic_attention"] = true;
    if (margin) doc["max_frames_margin"] = *margin;
  }
};

// RAII wrapper so every exit path frees the loaded model.
struct ModelHandle {
  sctts_model* model = nullptr;
  ~ModelHandle() { sctts_model_free(model); }

  bool load(const std::string& dir) {
    return sctts_model_load(dir.c_str(), &model) == SCTTS_OK;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speed-controllable text-to-speech toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", []() { return std::string(sctts_version()); });

  std::string config_path, out_path, manifest_path, ckpt_dir, text, texts_file;
  std::optional<int> size, seed, max_steps, batch_size, checkpoint_every;
  std::optional<double> correlation, sr, length_scale, lambda, alpha_scale;
  std::optional<bool> use_gst;
  std::string mel_out, attention_out, grid_list, scales_list;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
  };

  CLI::App* corpus = app.add_subcommand(
      "corpus-synth", "Generate the synthetic corpus with ground truth");
  add_config(corpus);
  corpus->add_option("--out", out_path, "Output directory")->required();
  corpus->add_option("--size", size, "Number of utterances");
  corpus->add_option("--seed", seed, "Generator seed");
  corpus->add_option("--correlation", correlation,
                     "Pitch-speed correlation in [-1, 1]");

  CLI::App* features = app.add_subcommand(
      "features", "Extract mel features for a manifest corpus");
  add_config(features);
  features->add_option("--manifest", manifest_path, "manifest.jsonl path")
      ->required();
  features->add_option("--out", out_path, "Output directory")->required();

  CLI::App* train = app.add_subcommand("train", "Train a model on a manifest");
  add_config(train);
  train->add_option("--manifest", manifest_path, "manifest.jsonl path")->required();
  train->add_option("--out", out_path, "Run directory for logs and checkpoints")
      ->required();
  train->add_option("--max-steps", max_steps, "Optimizer steps");
  train->add_option("--batch-size", batch_size, "Utterances per step");
  train->add_option("--seed", seed, "Training seed");
  train->add_option("--checkpoint-every", checkpoint_every,
                    "Periodic checkpoint interval (0: final only)");
  train->add_option("--alpha-scale", alpha_scale,
                    "Shrinks both loss-schedule milestones");
  train->add_option("--lambda", lambda, "Rate scale");
  bool gst_flag = false;
  train->add_flag("--gst", gst_flag, "Enable the style encoder");

  CLI::App* synth = app.add_subcommand("synth", "Synthesize one utterance");
  synth->add_option("--ckpt", ckpt_dir, "Checkpoint directory")->required();
  synth->add_option("--text", text, "Phoneme string")->required();
  synth->add_option("--out", out_path, "Output WAV path")->required();
  synth->add_option("--sr", sr, "Explicit rate value");
  synth->add_option("--length-scale", length_scale,
                    "Output length relative to normal speed");
  synth->add_option("--mel-out", mel_out, "Optional mel dump path");
  synth->add_option("--attention-out", attention_out,
                    "Optional attention matrix CSV path");
  StyleFlags synth_style;
  synth_style.attach(synth);

  CLI::App* scatter = app.add_subcommand(
      "analyze-scatter", "Rate vs mean F0 scatter of a corpus");
  add_config(scatter);
  scatter->add_option("--manifest", manifest_path, "manifest.jsonl path")
      ->required();
  scatter->add_option("--out", out_path, "Output CSV path")->required();

  CLI::App* f0sr = app.add_subcommand(
      "analyze-f0sr", "Mean F0 of synthesized speech across a rate grid");
  f0sr->add_option("--ckpt", ckpt_dir, "Checkpoint directory")->required();
  f0sr->add_option("--texts-file", texts_file, "File with one phoneme string per line")
      ->required();
  f0sr->add_option("--out", out_path, "Output CSV path")->required();
  f0sr->add_option("--grid", grid_list, "Comma-separated rate grid");
  StyleFlags f0sr_style;
  f0sr_style.attach(f0sr);

  CLI::App* length = app.add_subcommand(
      "analyze-length", "Requested vs achieved rate across length scales");
  length->add_option("--ckpt", ckpt_dir, "Checkpoint directory")->required();
  length->add_option("--texts-file", texts_file,
                     "File with one phoneme string per line")
      ->required();
  length->add_option("--out", out_path, "Output CSV path")->required();
  length->add_option("--scales", scales_list, "Comma-separated length scales");
  StyleFlags length_style;
  length_style.attach(length);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    ConfigBuilder config;
    config.set_path(config_path);

    if (corpus->parsed()) {
      config.override_key("corpus", "num_utterances", size);
      config.override_key("corpus", "seed", seed);
      config.override_key("corpus", "pitch_speed_correlation", correlation);
      if (sctts_corpus_synth(config.build().c_str(), out_path.c_str()) != SCTTS_OK)
        return fail_op("corpus-synth");
      std::cout << "wrote corpus and manifest under " << out_path << "\n";
      return kExitOk;
    }

    if (features->parsed()) {
      if (sctts_extract_features(config.build().c_str(), manifest_path.c_str(),
                                 out_path.c_str()) != SCTTS_OK)
        return fail_op("features");
      std::cout << "wrote mel features under " << out_path << "\n";
      return kExitOk;
    }

    if (train->parsed()) {
      config.override_key("train", "max_steps", max_steps);
      config.override_key("train", "batch_size", batch_size);
      config.override_key("train", "seed", seed);
      config.override_key("train", "checkpoint_every", checkpoint_every);
      config.override_key("train", "scale", alpha_scale);
      config.override_key("rate", "lambda", lambda);
      if (gst_flag) use_gst = true;
      config.override_key("model", "use_gst", use_gst);
      if (sctts_train(config.build().c_str(), manifest_path.c_str(),
                      out_path.c_str()) != SCTTS_OK)
        return fail_op("train");
      std::cout << "training done; final checkpoint in " << out_path
                << "/final\n";
      return kExitOk;
    }

    if (synth->parsed()) {
      ModelHandle m;
      if (!m.load(ckpt_dir)) return fail_op("loading " + ckpt_dir);
      json req{{"text", text}};
      if (sr) req["sr"] = *sr;
      if (length_scale) req["length_scale"] = *length_scale;
      synth_style.apply(req);
      if (sctts_synthesize(m.model, req.dump().c_str(), out_path.c_str(),
                           mel_out.empty() ? nullptr : mel_out.c_str(),
                           attention_out.empty() ? nullptr
                                                 : attention_out.c_str()) !=
          SCTTS_OK)
        return fail_op("synth");
      std::cout << "wrote " << out_path << "\n";
      return kExitOk;
    }

    if (scatter->parsed()) {
      char summary[4096] = {0};
      if (sctts_analyze_scatter(config.build().c_str(), manifest_path.c_str(),
                                out_path.c_str(), summary,
                                sizeof summary) != SCTTS_OK)
        return fail_op("analyze-scatter");
      std::cout << "wrote " << out_path << "\nsummary: " << summary << "\n";
      return kExitOk;
    }

    if (f0sr->parsed()) {
      ModelHandle m;
      if (!m.load(ckpt_dir)) return fail_op("loading " + ckpt_dir);
      json params{{"texts", read_lines(texts_file)}};
      if (!grid_list.empty()) params["grid"] = parse_number_list(grid_list);
      f0sr_style.apply(params);
      if (sctts_analyze_f0sr(m.model, params.dump().c_str(), out_path.c_str()) !=
          SCTTS_OK)
        return fail_op("analyze-f0sr");
      std::cout << "wrote " << out_path << "\n";
      return kExitOk;
    }

    if (length->parsed()) {
      ModelHandle m;
      if (!m.load(ckpt_dir)) return fail_op("loading " + ckpt_dir);
      json params{{"texts", read_lines(texts_file)}};
      if (!scales_list.empty())
        params["length_scales"] = parse_number_list(scales_list);
      length_style.apply(params);
      char summary[4096] = {0};
      if (sctts_analyze_length(m.model, params.dump().c_str(), out_path.c_str(),
                               summary, sizeof summary) != SCTTS_OK)
        return fail_op("analyze-length");
      std::cout << "wrote " << out_path << "\nsummary: " << summary << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }

  std::cerr << "error: no subcommand handled\n";
  return kExitUsage;
}
