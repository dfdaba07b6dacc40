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

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <vector>

#include "common.hpp"

namespace sctts {

// Dense row-major matrix of doubles. All network math runs in 64-bit so
// analytic gradients can be compared against central finite differences.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  static Tensor zeros(int r, int c) { return Tensor(r, c); }
  static Tensor full(int r, int c, double v) {
    Tensor t(r, c);
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
  }

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  size_t size() const { return data.size(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  bool is_scalar() const { return rows == 1 && cols == 1; }

  bool all_finite() const;
};

using EigenRowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<EigenRowMatrix>;
using CMatMap = Eigen::Map<const EigenRowMatrix>;

inline MatMap mat(Tensor& t) { return MatMap(t.data.data(), t.rows, t.cols); }
inline CMatMap mat(const Tensor& t) { return CMatMap(t.data.data(), t.rows, t.cols); }

// Uniform init on [-limit, limit] with limit = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(int rows, int cols, int fan_in, int fan_out, std::mt19937_64& rng);

}  // namespace sctts
