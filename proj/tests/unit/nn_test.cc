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


#include <doctest.h>

#include <cmath>
#include <functional>

#include "connshift/error.h"
#include "connshift/nn/optimizer.h"
#include "connshift/nn/rng.h"
#include "connshift/nn/tape.h"

namespace connshift::nn {
namespace {

Matrix RandomM(int r, int c, Rng& rng) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.Normal(0.0, 1.0);
  return m;
}

// Central-difference gradient of f at every entry of p.value.
Matrix NumericGrad(Parameter& p, const std::function<double()>& f) {
  const double h = 1e-6;
  Matrix g(p.value.rows(), p.value.cols());
  for (Eigen::Index i = 0; i < p.value.size(); ++i) {
    double saved = p.value.data()[i];
    p.value.data()[i] = saved + h;
    double up = f();
    p.value.data()[i] = saved - h;
    double down = f();
    p.value.data()[i] = saved;
    g.data()[i] = (up - down) / (2 * h);
  }
  return g;
}

void CheckGradients(std::vector<Parameter*> params,
                    const std::function<Var(Tape&)>& build) {
  for (Parameter* p : params) p->ZeroGrad();
  {
    Tape tape;
    tape.Backward(build(tape));
  }
  auto eval = [&] {
    Tape tape(false);
    return build(tape).scalar();
  };
  for (Parameter* p : params) {
    Matrix numeric = NumericGrad(*p, eval);
    CAPTURE(p->name);
    CHECK((p->grad - numeric).cwiseAbs().maxCoeff() <=
          1e-5 * (1.0 + numeric.cwiseAbs().maxCoeff()));
  }
}

// Weighted sum of all entries, so each entry gets a distinct upstream
// gradient.
Var Reduce(Tape& tape, Var x, const Matrix& weights) {
  Var prod = MatMulTransposed(x, tape.Constant(weights));
  Var left = MatMul(tape.Constant(Matrix::Ones(1, prod.rows())), prod);
  Var diag = MatMul(left, tape.Constant(Matrix::Identity(prod.cols(), 1)));
  return diag;
}

TEST_CASE("matmul, add, scale and activations match finite differences") {
  Rng rng(1);
  Parameter a("a", RandomM(3, 4, rng)), b("b", RandomM(4, 5, rng));
  Parameter row("row", RandomM(1, 5, rng));
  Matrix w = RandomM(2, 5, rng);
  CheckGradients({&a, &b, &row}, [&](Tape& t) {
    Var x = AddRow(MatMul(t.Param(a), t.Param(b)), t.Param(row));
    Var y = Add(Gelu(x), Scale(Tanh(x), 0.3));
    return Reduce(t, y, w);
  });
}

TEST_CASE("layer norm and softmax gradients") {
  Rng rng(2);
  Parameter x("x", RandomM(4, 6, rng));
  Parameter gain("gain", RandomM(1, 6, rng)), bias("bias", RandomM(1, 6, rng));
  Matrix w = RandomM(3, 6, rng);
  CheckGradients({&x, &gain, &bias}, [&](Tape& t) {
    Var h = LayerNorm(t.Param(x), t.Param(gain), t.Param(bias));
    return Reduce(t, Add(SoftmaxRows(h), LogSoftmaxRows(h)), w);
  });
}

TEST_CASE("slicing, concatenation, row replacement and gather") {
  Rng rng(3);
  Parameter x("x", RandomM(4, 6, rng)), r("r", RandomM(1, 3, rng));
  Parameter table("table", RandomM(7, 3, rng));
  Matrix w = RandomM(2, 9, rng);
  const std::vector<int> ids = {1, 4, 1, 6};
  CheckGradients({&x, &r, &table}, [&](Tape& t) {
    Var left = Cols(t.Param(x), 0, 3);
    Var right = Cols(t.Param(x), 3, 3);
    Var g = ReplaceRow(t.Gather(table, ids), 2, t.Param(r));
    Var mixed = MatMul(MatMulTransposed(left, right), g);  // 4 x 3
    Var shifted = Add(left, MatMul(t.Constant(Matrix::Ones(4, 1)), Row(right, 1)));
    std::vector<Var> parts = {mixed, g, shifted};
    Var joined = ConcatCols(parts);
    Var picked = Pick(joined, 2, 5);
    Var total = Add(Reduce(t, joined, w), Scale(picked, 3.0));
    return total;
  });
}

TEST_CASE("gradients accumulate across tapes until zeroed") {
  Parameter p("p", Matrix::Ones(1, 1));
  for (int i = 0; i < 2; ++i) {
    Tape t;
    t.Backward(Scale(t.Param(p), 2.0));
  }
  CHECK(p.grad(0, 0) == doctest::Approx(4.0));
  p.ZeroGrad();
  CHECK(p.grad(0, 0) == 0.0);
}

TEST_CASE("non-recording tapes leave gradients untouched") {
  Parameter p("p", Matrix::Ones(2, 2));
  Tape t(false);
  Var v = Scale(t.Param(p), 3.0);
  CHECK(v.value()(1, 1) == 3.0);
  CHECK_THROWS_AS(t.Backward(Pick(v, 0, 0)), UsageError);
}

TEST_CASE("backward requires a scalar root") {
  Tape t;
  Var v = t.Constant(Matrix::Ones(2, 2));
  CHECK_THROWS_AS(t.Backward(v), UsageError);
}

TEST_CASE("softmax rows sum to one") {
  Rng rng(4);
  Tape t(false);
  Var s = SoftmaxRows(t.Constant(RandomM(5, 7, rng) * 10.0));
  for (int r = 0; r < 5; ++r) CHECK(s.value().row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("AdamW minimizes a quadratic and skips decay on flagged params") {
  Parameter w("w", Matrix::Constant(1, 3, 5.0));
  Parameter b("b", Matrix::Constant(1, 1, 0.0), /*apply_decay=*/false);
  AdamW opt({&w, &b}, {.learning_rate = 0.1, .weight_decay = 0.0});
  for (int step = 0; step < 300; ++step) {
    Tape t;
    Var d = MatMulTransposed(t.Param(w), t.Param(w));
    t.Backward(d);
    opt.Step();
  }
  CHECK(w.value.cwiseAbs().maxCoeff() < 0.05);

  Parameter decayed("d", Matrix::Ones(1, 1));
  Parameter kept("k", Matrix::Ones(1, 1), false);
  AdamW decay_only({&decayed, &kept}, {.learning_rate = 0.1, .weight_decay = 0.5});
  decay_only.Step();
  CHECK(decayed.value(0, 0) == doctest::Approx(1.0 - 0.1 * 0.5));
  CHECK(kept.value(0, 0) == 1.0);
}

TEST_CASE("gradient clipping bounds the update direction norm") {
  Parameter w("w", Matrix::Zero(1, 2));
  AdamW opt({&w}, {.learning_rate = 1.0, .weight_decay = 0.0, .max_grad_norm = 1.0});
  w.grad << 30.0, 40.0;
  CHECK(opt.Step() == doctest::Approx(50.0));
}

TEST_CASE("open uniform stays strictly inside the unit interval") {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.OpenUniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

}  // namespace
}  // namespace connshift::nn
