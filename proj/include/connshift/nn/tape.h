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

// A small reverse-mode automatic differentiation tape over dense Eigen
// matrices. Every operation appends a node holding its value and a closure
// that propagates the node's gradient to its inputs; Backward() replays the
// closures in reverse order.
//
// Usage:
//   Tape tape;
//   Var x = tape.Constant(input);
//   Var h = AddRow(MatMul(x, tape.Param(w)), tape.Param(b));
//   Var loss = Pick(LogSoftmaxRows(h), 0, gold);
//   tape.Backward(Scale(loss, -1.0));   // accumulates into w.grad, b.grad
//
// A tape built with record_gradients = false skips the closures and is
// used for inference.

#ifndef CONNSHIFT_NN_TAPE_H_
#define CONNSHIFT_NN_TAPE_H_

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace connshift::nn {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// A trainable tensor with its gradient accumulator and AdamW moments.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix adam_m;
  Matrix adam_v;
  bool decay = true;  // weight decay applies (off for biases and norms)

  Parameter() = default;
  Parameter(std::string n, Matrix v, bool apply_decay = true)
      : name(std::move(n)), value(std::move(v)), decay(apply_decay) {
    ZeroGrad();
  }
  void ZeroGrad() { grad.setZero(value.rows(), value.cols()); }
};

class Tape;

// Handle to a node on a tape. Cheap to copy; valid until the tape is
// cleared.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  const Matrix& value() const;
  Tape& tape() const { return *tape_; }
  int id() const { return id_; }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  // Value of a 1x1 node.
  double scalar() const { return value()(0, 0); }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  explicit Tape(bool record_gradients = true) : record_(record_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }

  Var Constant(Matrix value);
  // Leaf bound to a parameter; on a recording tape gradients accumulate
  // into param.grad. Parameters are taken by const reference so frozen
  // models can run inference on non-recording tapes.
  Var Param(const Parameter& param);
  // Rows `ids` of a table parameter (embedding lookup); gradients are
  // scattered back into the selected rows of table.grad.
  Var Gather(const Parameter& table, std::span<const int> ids);

  // Seeds d(root)/d(root) = seed (root must be 1x1) and propagates.
  void Backward(Var root, double seed = 1.0);
  void Clear();
  std::size_t size() const { return nodes_.size(); }

  // Gradient accumulated for a node by Backward (zeros if none reached it).
  Matrix GradOf(Var v) const;

  // --- used by op implementations ---
  using BackwardFn = std::function<void(Tape&, int self)>;
  Var Push(Matrix value, bool needs_grad, BackwardFn backward);
  bool NeedsGrad(Var v) const { return nodes_[v.id()].needs_grad; }
  const Matrix& ValueAt(int id) const {
    const auto& n = nodes_[id];
    return n.value_ref ? *n.value_ref : n.value;
  }
  // Gradient buffer of a node, zero-initialized on first access.
  Matrix& GradAt(int id);

 private:
  struct Node {
    Matrix value;
    const Matrix* value_ref = nullptr;
    Matrix grad;
    Matrix* grad_ref = nullptr;
    bool needs_grad = false;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
  bool record_;
};

inline const Matrix& Var::value() const { return tape_->ValueAt(id_); }

// --- operations -------------------------------------------------------------

Var MatMul(Var a, Var b);             // a * b
Var MatMulTransposed(Var a, Var b);   // a * b^T
Var Add(Var a, Var b);                // same shape
Var AddRow(Var a, Var row);           // broadcast a 1xN row over a's rows
Var Scale(Var a, double s);
Var Gelu(Var a);                      // tanh approximation
Var Tanh(Var a);
// Row-wise layer normalization with 1xN gain and bias.
Var LayerNorm(Var x, Var gain, Var bias, double eps = 1e-5);
Var SoftmaxRows(Var x);
Var LogSoftmaxRows(Var x);
Var Row(Var x, Eigen::Index i);
Var Cols(Var x, Eigen::Index start, Eigen::Index count);
Var ConcatCols(std::span<const Var> parts);
// x with row i replaced by `row` (1xN).
Var ReplaceRow(Var x, Eigen::Index i, Var row);
// 1x1 node holding x(r, c).
Var Pick(Var x, Eigen::Index r, Eigen::Index c);
// Elementwise max(x, lo); no gradient flows through clamped entries.
Var ClampMin(Var x, double lo);

}  // namespace connshift::nn

#endif  // CONNSHIFT_NN_TAPE_H_
