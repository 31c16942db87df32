// Copyright 2026 The connshift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "connshift/nn/tape.h"

#include <cmath>
#include <numbers>
#include <utility>

#include "connshift/error.h"

namespace connshift::nn {

Var Tape::Push(Matrix value, bool needs_grad, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = record_ && needs_grad;
  if (n.needs_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Constant(Matrix value) { return Push(std::move(value), false, {}); }

Var Tape::Param(const Parameter& param) {
  Node n;
  n.value_ref = &param.value;
  if (record_) n.grad_ref = const_cast<Matrix*>(&param.grad);
  n.needs_grad = record_;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Gather(const Parameter& table, std::span<const int> ids) {
  Matrix out(static_cast<Eigen::Index>(ids.size()), table.value.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = table.value.row(ids[i]);
  }
  if (!record_) return Push(std::move(out), false, {});
  std::vector<int> rows(ids.begin(), ids.end());
  Matrix* target = const_cast<Matrix*>(&table.grad);
  return Push(std::move(out), true,
              [rows = std::move(rows), target](Tape& t, int self) {
                const Matrix& g = t.GradAt(self);
                for (std::size_t i = 0; i < rows.size(); ++i) {
                  target->row(rows[i]) +=
                      g.row(static_cast<Eigen::Index>(i));
                }
              });
}

Matrix& Tape::GradAt(int id) {
  Node& n = nodes_[id];
  if (n.grad_ref) return *n.grad_ref;
  if (n.grad.size() == 0) {
    const Matrix& v = ValueAt(id);
    n.grad.setZero(v.rows(), v.cols());
  }
  return n.grad;
}

Matrix Tape::GradOf(Var v) const {
  const Node& n = nodes_[v.id()];
  if (n.grad_ref) return *n.grad_ref;
  if (n.grad.size() == 0) {
    return Matrix::Zero(v.rows(), v.cols());
  }
  return n.grad;
}

void Tape::Backward(Var root, double seed) {
  if (!record_) throw UsageError("Backward on a non-recording tape");
  if (root.rows() != 1 || root.cols() != 1) {
    throw UsageError("Backward root must be a scalar");
  }
  GradAt(root.id())(0, 0) += seed;
  for (int i = root.id(); i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.needs_grad || !n.backward || n.grad.size() == 0) continue;
    n.backward(*this, i);
  }
}

void Tape::Clear() { nodes_.clear(); }

namespace {

bool AnyGrad(std::initializer_list<Var> vars) {
  for (const Var& v : vars) {
    if (v.tape().NeedsGrad(v)) return true;
  }
  return false;
}

void CheckSameTape(Var a, Var b) {
  if (&a.tape() != &b.tape()) throw UsageError("vars from different tapes");
}

}  // namespace

Var MatMul(Var a, Var b) {
  CheckSameTape(a, b);
  Tape& t = a.tape();
  const int ia = a.id(), ib = b.id();
  return t.Push(a.value() * b.value(), AnyGrad({a, b}),
                [ia, ib](Tape& t, int self) {
                  const Matrix& g = t.GradAt(self);
                  if (t.NeedsGrad(Var(&t, ia))) {
                    t.GradAt(ia).noalias() += g * t.ValueAt(ib).transpose();
                  }
                  if (t.NeedsGrad(Var(&t, ib))) {
                    t.GradAt(ib).noalias() += t.ValueAt(ia).transpose() * g;
                  }
                });
}

Var MatMulTransposed(Var a, Var b) {
  CheckSameTape(a, b);
  Tape& t = a.tape();
  const int ia = a.id(), ib = b.id();
  return t.Push(a.value() * b.value().transpose(), AnyGrad({a, b}),
                [ia, ib](Tape& t, int self) {
                  const Matrix& g = t.GradAt(self);
                  if (t.NeedsGrad(Var(&t, ia))) {
                    t.GradAt(ia).noalias() += g * t.ValueAt(ib);
                  }
                  if (t.NeedsGrad(Var(&t, ib))) {
                    t.GradAt(ib).noalias() += g.transpose() * t.ValueAt(ia);
                  }
                });
}

Var Add(Var a, Var b) {
  CheckSameTape(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw UsageError("Add: shape mismatch");
  }
  Tape& t = a.tape();
  const int ia = a.id(), ib = b.id();
  return t.Push(a.value() + b.value(), AnyGrad({a, b}),
                [ia, ib](Tape& t, int self) {
                  const Matrix& g = t.GradAt(self);
                  if (t.NeedsGrad(Var(&t, ia))) t.GradAt(ia) += g;
                  if (t.NeedsGrad(Var(&t, ib))) t.GradAt(ib) += g;
                });
}

Var AddRow(Var a, Var row) {
  CheckSameTape(a, row);
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw UsageError("AddRow: shape mismatch");
  }
  Tape& t = a.tape();
  const int ia = a.id(), ir = row.id();
  Matrix out = a.value();
  out.rowwise() += row.value().row(0);
  return t.Push(std::move(out), AnyGrad({a, row}),
                [ia, ir](Tape& t, int self) {
                  const Matrix& g = t.GradAt(self);
                  if (t.NeedsGrad(Var(&t, ia))) t.GradAt(ia) += g;
                  if (t.NeedsGrad(Var(&t, ir))) {
                    t.GradAt(ir) += g.colwise().sum();
                  }
                });
}

Var Scale(Var a, double s) {
  Tape& t = a.tape();
  const int ia = a.id();
  return t.Push(a.value() * s, AnyGrad({a}), [ia, s](Tape& t, int self) {
    t.GradAt(ia) += t.GradAt(self) * s;
  });
}

Var Gelu(Var a) {
  Tape& t = a.tape();
  const int ia = a.id();
  const double k = std::sqrt(2.0 / std::numbers::pi);
  Matrix out = a.value().unaryExpr([k](double x) {
    return 0.5 * x * (1.0 + std::tanh(k * (x + 0.044715 * x * x * x)));
  });
  return t.Push(std::move(out), AnyGrad({a}), [ia, k](Tape& t, int self) {
    const Matrix& x = t.ValueAt(ia);
    Matrix d = x.unaryExpr([k](double v) {
      double th = std::tanh(k * (v + 0.044715 * v * v * v));
      return 0.5 * (1.0 + th) +
             0.5 * v * (1.0 - th * th) * k * (1.0 + 3.0 * 0.044715 * v * v);
    });
    t.GradAt(ia) += t.GradAt(self).cwiseProduct(d);
  });
}

Var Tanh(Var a) {
  Tape& t = a.tape();
  const int ia = a.id();
  Matrix out = a.value().array().tanh().matrix();
  return t.Push(std::move(out), AnyGrad({a}), [ia](Tape& t, int self) {
    const Matrix& y = t.ValueAt(self);
    t.GradAt(ia) +=
        t.GradAt(self).cwiseProduct((1.0 - y.array().square()).matrix());
  });
}

Var LayerNorm(Var x, Var gain, Var bias, double eps) {
  CheckSameTape(x, gain);
  CheckSameTape(x, bias);
  Tape& t = x.tape();
  const Matrix& in = x.value();
  const Eigen::Index n = in.cols();
  Matrix xhat(in.rows(), n);
  Vector inv_std(in.rows());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    double mu = in.row(r).mean();
    double var = (in.row(r).array() - mu).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (in.row(r).array() - mu) * inv_std(r);
  }
  Matrix out = xhat;
  out.array().rowwise() *= gain.value().row(0).array();
  out.rowwise() += bias.value().row(0);
  const int ix = x.id(), ig = gain.id(), ib = bias.id();
  return t.Push(
      std::move(out), AnyGrad({x, gain, bias}),
      [ix, ig, ib, xhat = std::move(xhat), inv_std = std::move(inv_std), n](
          Tape& t, int self) {
        const Matrix& g = t.GradAt(self);
        if (t.NeedsGrad(Var(&t, ig))) {
          t.GradAt(ig) += g.cwiseProduct(xhat).colwise().sum();
        }
        if (t.NeedsGrad(Var(&t, ib))) t.GradAt(ib) += g.colwise().sum();
        if (t.NeedsGrad(Var(&t, ix))) {
          Matrix dxhat = g;
          dxhat.array().rowwise() *= t.ValueAt(ig).row(0).array();
          Matrix& dx = t.GradAt(ix);
          for (Eigen::Index r = 0; r < dxhat.rows(); ++r) {
            double mean_d = dxhat.row(r).mean();
            double mean_dx = dxhat.row(r).dot(xhat.row(r)) / n;
            dx.row(r).array() += inv_std(r) * (dxhat.row(r).array() - mean_d -
                                               xhat.row(r).array() * mean_dx);
          }
        }
      });
}

namespace {

Matrix SoftmaxOf(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double m = x.row(r).maxCoeff();
    auto e = (x.row(r).array() - m).exp();
    out.row(r) = e / e.sum();
  }
  return out;
}

}  // namespace

Var SoftmaxRows(Var x) {
  Tape& t = x.tape();
  const int ix = x.id();
  return t.Push(SoftmaxOf(x.value()), AnyGrad({x}), [ix](Tape& t, int self) {
    const Matrix& y = t.ValueAt(self);
    const Matrix& g = t.GradAt(self);
    Matrix& dx = t.GradAt(ix);
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      double dot = g.row(r).dot(y.row(r));
      dx.row(r).array() += y.row(r).array() * (g.row(r).array() - dot);
    }
  });
}

Var LogSoftmaxRows(Var x) {
  Tape& t = x.tape();
  const Matrix& in = x.value();
  Matrix out(in.rows(), in.cols());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    double m = in.row(r).maxCoeff();
    double lse = m + std::log((in.row(r).array() - m).exp().sum());
    out.row(r) = in.row(r).array() - lse;
  }
  const int ix = x.id();
  return t.Push(std::move(out), AnyGrad({x}), [ix](Tape& t, int self) {
    const Matrix& y = t.ValueAt(self);
    const Matrix& g = t.GradAt(self);
    Matrix& dx = t.GradAt(ix);
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      double total = g.row(r).sum();
      dx.row(r).array() += g.row(r).array() - y.row(r).array().exp() * total;
    }
  });
}

Var Row(Var x, Eigen::Index i) {
  Tape& t = x.tape();
  const int ix = x.id();
  return t.Push(x.value().row(i), AnyGrad({x}), [ix, i](Tape& t, int self) {
    t.GradAt(ix).row(i) += t.GradAt(self).row(0);
  });
}

Var Cols(Var x, Eigen::Index start, Eigen::Index count) {
  Tape& t = x.tape();
  const int ix = x.id();
  return t.Push(x.value().middleCols(start, count), AnyGrad({x}),
                [ix, start, count](Tape& t, int self) {
                  t.GradAt(ix).middleCols(start, count) += t.GradAt(self);
                });
}

Var ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) throw UsageError("ConcatCols of nothing");
  Tape& t = parts[0].tape();
  Eigen::Index rows = parts[0].rows(), cols = 0;
  bool needs = false;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw UsageError("ConcatCols: row mismatch");
    cols += p.cols();
    needs = needs || t.NeedsGrad(p);
  }
  Matrix out(rows, cols);
  std::vector<std::pair<int, Eigen::Index>> layout;
  Eigen::Index offset = 0;
  for (const Var& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    layout.emplace_back(p.id(), offset);
    offset += p.cols();
  }
  return t.Push(std::move(out), needs,
                [layout = std::move(layout)](Tape& t, int self) {
                  const Matrix& g = t.GradAt(self);
                  for (const auto& [id, off] : layout) {
                    if (!t.NeedsGrad(Var(&t, id))) continue;
                    Matrix& d = t.GradAt(id);
                    d += g.middleCols(off, d.cols());
                  }
                });
}

Var ReplaceRow(Var x, Eigen::Index i, Var row) {
  CheckSameTape(x, row);
  if (row.rows() != 1 || row.cols() != x.cols()) {
    throw UsageError("ReplaceRow: shape mismatch");
  }
  Tape& t = x.tape();
  Matrix out = x.value();
  out.row(i) = row.value().row(0);
  const int ix = x.id(), ir = row.id();
  return t.Push(std::move(out), AnyGrad({x, row}),
                [ix, ir, i](Tape& t, int self) {
                  const Matrix& g = t.GradAt(self);
                  if (t.NeedsGrad(Var(&t, ix))) {
                    Matrix& dx = t.GradAt(ix);
                    for (Eigen::Index r = 0; r < g.rows(); ++r) {
                      if (r != i) dx.row(r) += g.row(r);
                    }
                  }
                  if (t.NeedsGrad(Var(&t, ir))) t.GradAt(ir) += g.row(i);
                });
}

Var Pick(Var x, Eigen::Index r, Eigen::Index c) {
  Tape& t = x.tape();
  const int ix = x.id();
  Matrix out(1, 1);
  out(0, 0) = x.value()(r, c);
  return t.Push(std::move(out), AnyGrad({x}), [ix, r, c](Tape& t, int self) {
    t.GradAt(ix)(r, c) += t.GradAt(self)(0, 0);
  });
}

Var ClampMin(Var x, double lo) {
  Tape& t = x.tape();
  const int ix = x.id();
  Matrix out = x.value().cwiseMax(lo);
  return t.Push(std::move(out), AnyGrad({x}), [ix, lo](Tape& t, int self) {
    const Matrix& in = t.ValueAt(ix);
    const Matrix& g = t.GradAt(self);
    Matrix& gx = t.GradAt(ix);
    for (Eigen::Index i = 0; i < in.size(); ++i) {
      if (in.data()[i] >= lo) gx.data()[i] += g.data()[i];
    }
  });
}

}  // namespace connshift::nn
