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

#include "tensor.hpp"

#include <cmath>

namespace sctts {

bool Tensor::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor glorot_uniform(int rows, int cols, int fan_in, int fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor t(rows, cols);
  for (double& v : t.data) v = dist(rng);
  return t;
}

}  // namespace sctts
