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

#include <deque>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "tensor.hpp"

namespace sctts {

// Handle into a Graph's tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode autodiff over a flat tape of matrix ops. One Graph per forward
// pass; parameters are referenced (not copied) and their gradients are read
// back through the Var returned by param(). Construct with grad_enabled=false
// for inference: the tape then skips closures and gradient bookkeeping.
class Graph {
 public:
  explicit Graph(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  Var input(Tensor value);                    // constant, no gradient
  // External tensor that receives gradient. Memoized by pointer: repeated
  // calls return the same node, so all uses share one gradient accumulator.
  Var param(const Tensor* value);

  const Tensor& val(Var v) const { return nodes_[v.id].ext ? *nodes_[v.id].ext : nodes_[v.id].owned; }
  // Gradient of the last backward() wrt v; zeros if v never received one.
  Tensor grad(Var v) const;

  // --- elementwise and linear ops ---
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var cmul(Var a, Var b);
  Var affine(Var x, double scale, double shift);  // scale*x + shift
  Var add_row(Var x, Var row);                    // broadcast 1 x n over rows
  Var matmul(Var a, Var b);
  Var matmul_nt(Var a, Var b);                    // a * b^T
  Var sigmoid(Var x);
  Var tanh(Var x);
  Var relu(Var x);
  Var abs(Var x);
  Var softmax_rows(Var x);
  Var mul_const(Var x, Tensor m);                 // elementwise by a constant
  Var sum_all(Var x);                             // 1x1
  // Elementwise binary KL of constant target y against prediction p:
  // y*log(y/p) + (1-y)*log((1-y)/(1-p)), p clamped to [1e-8, 1-1e-8].
  Var binary_kl(Var pred, Tensor target);

  // --- shape ops ---
  Var concat_cols(Var a, Var b);
  Var slice_cols(Var x, int c0, int c1);
  Var slice_rows(Var x, int r0, int r1);

  // --- network ops ---
  // x: T x Cin, w: (k*Cin) x Cout laid out [tap][cin], b: 1 x Cout.
  // causal taps reach back in time only; non-causal is centered (odd k).
  Var conv1d(Var x, Var w, Var b, int k, int dilation, bool causal);
  // Transposed conv, kernel 2 stride 2: output has exactly 2x the rows.
  // w: (2*Cin) x Cout laid out [tap][cin].
  Var upsample_conv_x2(Var x, Var w, Var b);
  // 3x3 stride-2 conv over a time x freq grid in channels-last layout:
  // x: T x (F*Cin), output: ceil(T/2) x (ceil(F/2)*Cout), w: (9*Cin) x Cout.
  Var conv2d_s2(Var x, Var w, Var b, int freq, int cin, int cout);
  // Row gather from an embedding table (vocab x e).
  Var embed(Var table, std::vector<int> ids);
  // Inverted dropout; identity when p == 0 or rng == nullptr.
  Var dropout(Var x, double p, std::mt19937_64* rng);

  void backward(Var scalar_loss);

  size_t num_nodes() const { return nodes_.size(); }
  bool grad_enabled() const { return grad_enabled_; }

 private:
  struct Node {
    Tensor owned;
    const Tensor* ext = nullptr;
    Tensor grad_value;
    bool grad_alloc = false;
    bool needs_grad = false;
    std::function<void(Graph&)> back;
  };

  Var push(Tensor value, bool needs_grad, std::function<void(Graph&)> back);
  // Accumulation target for a node's gradient, allocated on first use.
  Tensor& grad_ref(int id);
  bool has_grad(int id) const { return nodes_[id].grad_alloc; }
  const Tensor& grad_of(int id) const { return nodes_[id].grad_value; }
  bool needs(Var v) const { return nodes_[v.id].needs_grad; }

  // deque: push_back must not invalidate references handed out by val().
  std::deque<Node> nodes_;
  std::map<const Tensor*, int> param_cache_;
  bool grad_enabled_;
};

}  // namespace sctts
