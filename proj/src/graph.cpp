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

#include "graph.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace sctts {

namespace {
constexpr double kKlClamp = 1e-8;
}

Var Graph::push(Tensor value, bool needs_grad, std::function<void(Graph&)> back) {
  Node n;
  n.owned = std::move(value);
  n.needs_grad = grad_enabled_ && needs_grad;
  if (n.needs_grad) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Graph::input(Tensor value) { return push(std::move(value), false, nullptr); }

Var Graph::param(const Tensor* value) {
  const auto it = param_cache_.find(value);
  if (it != param_cache_.end()) return Var{it->second};
  Node n;
  n.ext = value;
  n.needs_grad = grad_enabled_;
  nodes_.push_back(std::move(n));
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_cache_[value] = id;
  return Var{id};
}

Tensor Graph::grad(Var v) const {
  const Node& n = nodes_[v.id];
  if (n.grad_alloc) return n.grad_value;
  const Tensor& val_ref = n.ext ? *n.ext : n.owned;
  return Tensor::zeros(val_ref.rows, val_ref.cols);
}

Tensor& Graph::grad_ref(int id) {
  Node& n = nodes_[id];
  if (!n.grad_alloc) {
    const Tensor& v = n.ext ? *n.ext : n.owned;
    n.grad_value = Tensor::zeros(v.rows, v.cols);
    n.grad_alloc = true;
  }
  return n.grad_value;
}

void Graph::backward(Var scalar_loss) {
  if (!grad_enabled_) fail(ErrorCode::kInternal, "backward on a no-grad graph");
  if (!val(scalar_loss).is_scalar()) fail(ErrorCode::kInternal, "backward target is not scalar");
  grad_ref(scalar_loss.id).data[0] = 1.0;
  for (int id = scalar_loss.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.grad_alloc && n.back) n.back(*this);
  }
}

Var Graph::add(Var a, Var b) {
  const Tensor &ta = val(a), &tb = val(b);
  if (!ta.same_shape(tb)) fail(ErrorCode::kInternal, "add: shape mismatch");
  Tensor out = ta;
  mat(out) += mat(tb);
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a) || needs(b), [a, b, out_id](Graph& g) {
    const Tensor& go = g.grad_of(out_id);
    if (g.needs(a)) mat(g.grad_ref(a.id)) += mat(go);
    if (g.needs(b)) mat(g.grad_ref(b.id)) += mat(go);
  });
}

Var Graph::sub(Var a, Var b) {
  const Tensor &ta = val(a), &tb = val(b);
  if (!ta.same_shape(tb)) fail(ErrorCode::kInternal, "sub: shape mismatch");
  Tensor out = ta;
  mat(out) -= mat(tb);
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a) || needs(b), [a, b, out_id](Graph& g) {
    const Tensor& go = g.grad_of(out_id);
    if (g.needs(a)) mat(g.grad_ref(a.id)) += mat(go);
    if (g.needs(b)) mat(g.grad_ref(b.id)) -= mat(go);
  });
}

Var Graph::cmul(Var a, Var b) {
  const Tensor &ta = val(a), &tb = val(b);
  if (!ta.same_shape(tb)) fail(ErrorCode::kInternal, "cmul: shape mismatch");
  Tensor out = ta;
  mat(out).array() *= mat(tb).array();
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a) || needs(b), [a, b, out_id](Graph& g) {
    const Tensor& go = g.grad_of(out_id);
    if (g.needs(a)) mat(g.grad_ref(a.id)).array() += mat(go).array() * mat(g.val(b)).array();
    if (g.needs(b)) mat(g.grad_ref(b.id)).array() += mat(go).array() * mat(g.val(a)).array();
  });
}

Var Graph::affine(Var x, double scale, double shift) {
  Tensor out = val(x);
  mat(out).array() = mat(out).array() * scale + shift;
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(x), [x, scale, out_id](Graph& g) {
    mat(g.grad_ref(x.id)) += scale * mat(g.grad_of(out_id));
  });
}

Var Graph::add_row(Var x, Var row) {
  const Tensor &tx = val(x), &tr = val(row);
  if (tr.rows != 1 || tr.cols != tx.cols) fail(ErrorCode::kInternal, "add_row: shape mismatch");
  Tensor out = tx;
  mat(out).rowwise() += mat(tr).row(0);
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(x) || needs(row), [x, row, out_id](Graph& g) {
    const Tensor& go = g.grad_of(out_id);
    if (g.needs(x)) mat(g.grad_ref(x.id)) += mat(go);
    if (g.needs(row)) mat(g.grad_ref(row.id)).row(0) += mat(go).colwise().sum();
  });
}

Var Graph::matmul(Var a, Var b) {
  const Tensor &ta = val(a), &tb = val(b);
  if (ta.cols != tb.rows) fail(ErrorCode::kInternal, "matmul: shape mismatch");
  Tensor out(ta.rows, tb.cols);
  mat(out).noalias() = mat(ta) * mat(tb);
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a) || needs(b), [a, b, out_id](Graph& g) {
    const Tensor& go = g.grad_of(out_id);
    if (g.needs(a)) mat(g.grad_ref(a.id)).noalias() += mat(go) * mat(g.val(b)).transpose();
    if (g.needs(b)) mat(g.grad_ref(b.id)).noalias() += mat(g.val(a)).transpose() * mat(go);
  });
}

Var Graph::matmul_nt(Var a, Var b) {
  const Tensor &ta = val(a), &tb = val(b);
  if (ta.cols != tb.cols) fail(ErrorCode::kInternal, "matmul_nt: shape mismatch");
  Tensor out(ta.rows, tb.rows);
  mat(out).noalias() = mat(ta) * mat(tb).transpose();
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a) || needs(b), [a, b, out_id](Graph& g) {
    const Tensor& go = g.grad_of(out_id);
    if (g.needs(a)) mat(g.grad_ref(a.id)).noalias() += mat(go) * mat(g.val(b));
    if (g.needs(b)) mat(g.grad_ref(b.id)).noalias() += mat(go).transpose() * mat(g.val(a));
  });
}

Var Graph::sigmoid(Var x) {
  Tensor out = val(x);
  for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(x), [x, out_id](Graph& g) {
    const Tensor& y = g.val(Var{out_id});
    const Tensor& go = g.grad_of(out_id);
    auto ya = mat(y).array();
    mat(g.grad_ref(x.id)).array() += mat(go).array() * ya * (1.0 - ya);
  });
}

Var Graph::tanh(Var x) {
  Tensor out = val(x);
  for (double& v : out.data) v = std::tanh(v);
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(x), [x, out_id](Graph& g) {
    auto ya = mat(g.val(Var{out_id})).array();
    mat(g.grad_ref(x.id)).array() += mat(g.grad_of(out_id)).array() * (1.0 - ya * ya);
  });
}

Var Graph::relu(Var x) {
  Tensor out = val(x);
  for (double& v : out.data) v = std::max(v, 0.0);
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(x), [x, out_id](Graph& g) {
    const Tensor& in = g.val(x);
    const Tensor& go = g.grad_of(out_id);
    Tensor& gx = g.grad_ref(x.id);
    for (size_t i = 0; i < in.data.size(); ++i) {
      if (in.data[i] > 0.0) gx.data[i] += go.data[i];
    }
  });
}

Var Graph::abs(Var x) {
  Tensor out = val(x);
  for (double& v : out.data) v = std::fabs(v);
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(x), [x, out_id](Graph& g) {
    const Tensor& in = g.val(x);
    const Tensor& go = g.grad_of(out_id);
    Tensor& gx = g.grad_ref(x.id);
    for (size_t i = 0; i < in.data.size(); ++i) {
      if (in.data[i] > 0.0) gx.data[i] += go.data[i];
      else if (in.data[i] < 0.0) gx.data[i] -= go.data[i];
    }
  });
}

Var Graph::softmax_rows(Var x) {
  Tensor out = val(x);
  for (int r = 0; r < out.rows; ++r) {
    double mx = -1e300;
    for (int c = 0; c < out.cols; ++c) mx = std::max(mx, out.at(r, c));
    double sum = 0.0;
    for (int c = 0; c < out.cols; ++c) {
      double e = std::exp(out.at(r, c) - mx);
      out.at(r, c) = e;
      sum += e;
    }
    for (int c = 0; c < out.cols; ++c) out.at(r, c) /= sum;
  }
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(x), [x, out_id](Graph& g) {
    const Tensor& y = g.val(Var{out_id});
    const Tensor& go = g.grad_of(out_id);
    Tensor& gx = g.grad_ref(x.id);
    for (int r = 0; r < y.rows; ++r) {
      double dot = 0.0;
      for (int c = 0; c < y.cols; ++c) dot += go.at(r, c) * y.at(r, c);
      for (int c = 0; c < y.cols; ++c) gx.at(r, c) += y.at(r, c) * (go.at(r, c) - dot);
    }
  });
}

Var Graph::mul_const(Var x, Tensor m) {
  const Tensor& tx = val(x);
  if (!tx.same_shape(m)) fail(ErrorCode::kInternal, "mul_const: shape mismatch");
  Tensor out = tx;
  mat(out).array() *= mat(m).array();
  int out_id = static_cast<int>(nodes_.size());
  bool ng = needs(x);
  Tensor m_kept = ng ? std::move(m) : Tensor();
  return push(std::move(out), ng, [x, out_id, m_kept = std::move(m_kept)](Graph& g) {
    mat(g.grad_ref(x.id)).array() += mat(g.grad_of(out_id)).array() * mat(m_kept).array();
  });
}

Var Graph::sum_all(Var x) {
  Tensor out(1, 1);
  out.data[0] = mat(val(x)).sum();
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(x), [x, out_id](Graph& g) {
    mat(g.grad_ref(x.id)).array() += g.grad_of(out_id).data[0];
  });
}

Var Graph::binary_kl(Var pred, Tensor target) {
  const Tensor& tp = val(pred);
  if (!tp.same_shape(target)) fail(ErrorCode::kInternal, "binary_kl: shape mismatch");
  Tensor out(tp.rows, tp.cols);
  for (size_t i = 0; i < tp.data.size(); ++i) {
    double y = target.data[i];
    double p = std::clamp(tp.data[i], kKlClamp, 1.0 - kKlClamp);
    double v = 0.0;
    if (y > 0.0) v += y * std::log(y / p);
    if (y < 1.0) v += (1.0 - y) * std::log((1.0 - y) / (1.0 - p));
    out.data[i] = v;
  }
  int out_id = static_cast<int>(nodes_.size());
  bool ng = needs(pred);
  Tensor t_kept = ng ? std::move(target) : Tensor();
  return push(std::move(out), ng, [pred, out_id, t_kept = std::move(t_kept)](Graph& g) {
    const Tensor& tp = g.val(pred);
    const Tensor& go = g.grad_of(out_id);
    Tensor& gp = g.grad_ref(pred.id);
    for (size_t i = 0; i < tp.data.size(); ++i) {
      double p = tp.data[i];
      if (p <= kKlClamp || p >= 1.0 - kKlClamp) continue;  // clamped: flat
      double y = t_kept.data[i];
      gp.data[i] += go.data[i] * (-y / p + (1.0 - y) / (1.0 - p));
    }
  });
}

Var Graph::concat_cols(Var a, Var b) {
  const Tensor &ta = val(a), &tb = val(b);
  if (ta.rows != tb.rows) fail(ErrorCode::kInternal, "concat_cols: row mismatch");
  Tensor out(ta.rows, ta.cols + tb.cols);
  mat(out).leftCols(ta.cols) = mat(ta);
  mat(out).rightCols(tb.cols) = mat(tb);
  int out_id = static_cast<int>(nodes_.size());
  int ca = ta.cols, cb = tb.cols;
  return push(std::move(out), needs(a) || needs(b), [a, b, ca, cb, out_id](Graph& g) {
    const Tensor& go = g.grad_of(out_id);
    if (g.needs(a)) mat(g.grad_ref(a.id)) += mat(go).leftCols(ca);
    if (g.needs(b)) mat(g.grad_ref(b.id)) += mat(go).rightCols(cb);
  });
}

Var Graph::slice_cols(Var x, int c0, int c1) {
  const Tensor& tx = val(x);
  if (c0 < 0 || c1 > tx.cols || c0 >= c1) fail(ErrorCode::kInternal, "slice_cols: bad range");
  Tensor out(tx.rows, c1 - c0);
  mat(out) = mat(tx).middleCols(c0, c1 - c0);
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(x), [x, c0, c1, out_id](Graph& g) {
    mat(g.grad_ref(x.id)).middleCols(c0, c1 - c0) += mat(g.grad_of(out_id));
  });
}

Var Graph::slice_rows(Var x, int r0, int r1) {
  const Tensor& tx = val(x);
  if (r0 < 0 || r1 > tx.rows || r0 >= r1) fail(ErrorCode::kInternal, "slice_rows: bad range");
  Tensor out(r1 - r0, tx.cols);
  mat(out) = mat(tx).middleRows(r0, r1 - r0);
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(x), [x, r0, r1, out_id](Graph& g) {
    mat(g.grad_ref(x.id)).middleRows(r0, r1 - r0) += mat(g.grad_of(out_id));
  });
}

namespace {
// Valid output-row range [a, a+len) for a tap that reads input row t + off.
inline void tap_range(int rows, int off, int* a, int* len) {
  *a = std::max(0, -off);
  int end = std::min(rows, rows - off);
  *len = std::max(0, end - *a);
}
}  // namespace

Var Graph::conv1d(Var x, Var w, Var b, int k, int dilation, bool causal) {
  const Tensor &tx = val(x), &tw = val(w), &tb = val(b);
  const int t_len = tx.rows, cin = tx.cols, cout = tw.cols;
  if (tw.rows != k * cin) fail(ErrorCode::kInternal, "conv1d: weight shape");
  if (tb.rows != 1 || tb.cols != cout) fail(ErrorCode::kInternal, "conv1d: bias shape");
  if (!causal && k % 2 == 0) fail(ErrorCode::kInternal, "conv1d: even kernel needs causal");
  const int anchor = causal ? (k - 1) : (k - 1) / 2;

  Tensor out(t_len, cout);
  mat(out).rowwise() = mat(tb).row(0);
  for (int j = 0; j < k; ++j) {
    int off = (j - anchor) * dilation;
    int a, len;
    tap_range(t_len, off, &a, &len);
    if (len <= 0) continue;
    mat(out).middleRows(a, len).noalias() +=
        mat(tx).middleRows(a + off, len) * mat(tw).middleRows(j * cin, cin);
  }
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(x) || needs(w) || needs(b),
              [x, w, b, k, dilation, anchor, cin, out_id](Graph& g) {
                const Tensor& go = g.grad_of(out_id);
                const int t_len = go.rows;
                for (int j = 0; j < k; ++j) {
                  int off = (j - anchor) * dilation;
                  int a, len;
                  tap_range(t_len, off, &a, &len);
                  if (len <= 0) continue;
                  if (g.needs(x))
                    mat(g.grad_ref(x.id)).middleRows(a + off, len).noalias() +=
                        mat(go).middleRows(a, len) *
                        mat(g.val(w)).middleRows(j * cin, cin).transpose();
                  if (g.needs(w))
                    mat(g.grad_ref(w.id)).middleRows(j * cin, cin).noalias() +=
                        mat(g.val(x)).middleRows(a + off, len).transpose() *
                        mat(go).middleRows(a, len);
                }
                if (g.needs(b)) mat(g.grad_ref(b.id)).row(0) += mat(go).colwise().sum();
              });
}

Var Graph::upsample_conv_x2(Var x, Var w, Var b) {
  const Tensor &tx = val(x), &tw = val(w), &tb = val(b);
  const int t_len = tx.rows, cin = tx.cols, cout = tw.cols;
  if (tw.rows != 2 * cin) fail(ErrorCode::kInternal, "upsample_conv_x2: weight shape");
  Tensor out(2 * t_len, cout);
  EigenRowMatrix even = mat(tx) * mat(tw).topRows(cin);
  EigenRowMatrix odd = mat(tx) * mat(tw).bottomRows(cin);
  for (int t = 0; t < t_len; ++t) {
    mat(out).row(2 * t) = even.row(t) + mat(tb).row(0);
    mat(out).row(2 * t + 1) = odd.row(t) + mat(tb).row(0);
  }
  int out_id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(x) || needs(w) || needs(b),
              [x, w, b, cin, out_id](Graph& g) {
                const Tensor& go = g.grad_of(out_id);
                const int t_len = go.rows / 2;
                EigenRowMatrix ge(t_len, go.cols), gd(t_len, go.cols);
                for (int t = 0; t < t_len; ++t) {
                  ge.row(t) = mat(go).row(2 * t);
                  gd.row(t) = mat(go).row(2 * t + 1);
                }
                if (g.needs(x))
                  mat(g.grad_ref(x.id)).noalias() +=
                      ge * mat(g.val(w)).topRows(cin).transpose() +
                      gd * mat(g.val(w)).bottomRows(cin).transpose();
                if (g.needs(w)) {
                  mat(g.grad_ref(w.id)).topRows(cin).noalias() += mat(g.val(x)).transpose() * ge;
                  mat(g.grad_ref(w.id)).bottomRows(cin).noalias() += mat(g.val(x)).transpose() * gd;
                }
                if (g.needs(b))
                  mat(g.grad_ref(b.id)).row(0) += ge.colwise().sum() + gd.colwise().sum();
              });
}

Var Graph::conv2d_s2(Var x, Var w, Var b, int freq, int cin, int cout) {
  const Tensor &tx = val(x), &tw = val(w);
  const int t_len = tx.rows;
  if (tx.cols != freq * cin) fail(ErrorCode::kInternal, "conv2d_s2: input layout");
  if (tw.rows != 9 * cin || tw.cols != cout) fail(ErrorCode::kInternal, "conv2d_s2: weight shape");
  const int t2 = (t_len + 1) / 2, f2 = (freq + 1) / 2;

  // im2col with pad 1, stride 2; patch layout [kt*3+kf][cin].
  Tensor m(t2 * f2, 9 * cin);
  for (int ot = 0; ot < t2; ++ot) {
    for (int of = 0; of < f2; ++of) {
      double* row = &m.at(ot * f2 + of, 0);
      for (int kt = 0; kt < 3; ++kt) {
        int it = 2 * ot + kt - 1;
        for (int kf = 0; kf < 3; ++kf) {
          int f = 2 * of + kf - 1;
          double* dst = row + (kt * 3 + kf) * cin;
          if (it >= 0 && it < t_len && f >= 0 && f < freq) {
            const double* src = tx.data.data() + static_cast<size_t>(it) * tx.cols + f * cin;
            std::copy(src, src + cin, dst);
          }
        }
      }
    }
  }
  Tensor out(t2, f2 * cout);
  {
    EigenRowMatrix y2 = mat(m) * mat(tw);
    y2.rowwise() += mat(val(b)).row(0);
    for (int ot = 0; ot < t2; ++ot)
      for (int of = 0; of < f2; ++of)
        for (int oc = 0; oc < cout; ++oc) out.at(ot, of * cout + oc) = y2(ot * f2 + of, oc);
  }
  int out_id = static_cast<int>(nodes_.size());
  bool ng = needs(x) || needs(w) || needs(b);
  Tensor m_kept = ng ? std::move(m) : Tensor();
  return push(std::move(out), ng,
              [x, w, b, freq, cin, cout, t2, f2, out_id, m_kept = std::move(m_kept)](Graph& g) {
                const Tensor& go = g.grad_of(out_id);
                Tensor gy2(t2 * f2, cout);
                for (int ot = 0; ot < t2; ++ot)
                  for (int of = 0; of < f2; ++of)
                    for (int oc = 0; oc < cout; ++oc)
                      gy2.at(ot * f2 + of, oc) = go.at(ot, of * cout + oc);
                if (g.needs(w))
                  mat(g.grad_ref(w.id)).noalias() += mat(m_kept).transpose() * mat(gy2);
                if (g.needs(b)) mat(g.grad_ref(b.id)).row(0) += mat(gy2).colwise().sum();
                if (g.needs(x)) {
                  EigenRowMatrix gm = mat(gy2) * mat(g.val(w)).transpose();
                  Tensor& gx = g.grad_ref(x.id);
                  const int t_len = g.val(x).rows;
                  for (int ot = 0; ot < t2; ++ot) {
                    for (int of = 0; of < f2; ++of) {
                      for (int kt = 0; kt < 3; ++kt) {
                        int it = 2 * ot + kt - 1;
                        if (it < 0 || it >= t_len) continue;
                        for (int kf = 0; kf < 3; ++kf) {
                          int f = 2 * of + kf - 1;
                          if (f < 0 || f >= freq) continue;
                          for (int c = 0; c < cin; ++c)
                            gx.at(it, f * cin + c) += gm(ot * f2 + of, (kt * 3 + kf) * cin + c);
                        }
                      }
                    }
                  }
                }
              });
}

Var Graph::embed(Var table, std::vector<int> ids) {
  const Tensor& tt = val(table);
  Tensor out(static_cast<int>(ids.size()), tt.cols);
  for (size_t p = 0; p < ids.size(); ++p) {
    if (ids[p] < 0 || ids[p] >= tt.rows)
      fail(ErrorCode::kDomain, "embedding id out of range: " + std::to_string(ids[p]));
    mat(out).row(static_cast<int>(p)) = mat(tt).row(ids[p]);
  }
  int out_id = static_cast<int>(nodes_.size());
  bool ng = needs(table);
  return push(std::move(out), ng, [table, out_id, ids = std::move(ids)](Graph& g) {
    const Tensor& go = g.grad_of(out_id);
    Tensor& gt = g.grad_ref(table.id);
    for (size_t p = 0; p < ids.size(); ++p)
      mat(gt).row(ids[p]) += mat(go).row(static_cast<int>(p));
  });
}

Var Graph::dropout(Var x, double p, std::mt19937_64* rng) {
  if (p <= 0.0 || rng == nullptr) return x;
  if (p >= 1.0) fail(ErrorCode::kInvalidArgument, "dropout rate must be < 1");
  const Tensor& tx = val(x);
  Tensor mask(tx.rows, tx.cols);
  std::bernoulli_distribution keep(1.0 - p);
  const double scale = 1.0 / (1.0 - p);
  for (double& v : mask.data) v = keep(*rng) ? scale : 0.0;
  return mul_const(x, std::move(mask));
}

}  // namespace sctts
