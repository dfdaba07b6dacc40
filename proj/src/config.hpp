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

#include <string>

#include "corpus.hpp"
#include "dsp.hpp"
#include "model.hpp"
#include "train.hpp"

namespace sctts {

// Application-level configuration: one JSON document with optional sections
// "features", "model", "train", "rate", "corpus", and "paths". Absent
// sections keep their defaults; unknown keys anywhere are rejected so typos
// cannot silently fall back to defaults. The rate scale lambda lives only in
// the "rate" section and is copied into the training configuration.
struct AppConfig {
  FeatureConfig features;
  ModelConfig model;
  TrainConfig train;
  SynthConfig corpus;
  double lambda = 100.0;
  std::string work_dir;
  std::string manifest;
};

AppConfig parse_config_json(const std::string& text);

// The full schema with every default filled in, as a starting document.
std::string default_config_json();

}  // namespace sctts
