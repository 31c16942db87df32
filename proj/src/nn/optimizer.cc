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

#include "connshift/nn/optimizer.h"

#include <cmath>

namespace connshift::nn {

AdamW::AdamW(std::vector<Parameter*> params, AdamWOptions options)
    : params_(std::move(params)), options_(options) {
  for (Parameter* p : params_) {
    p->adam_m.setZero(p->value.rows(), p->value.cols());
    p->adam_v.setZero(p->value.rows(), p->value.cols());
    p->ZeroGrad();
  }
}

void AdamW::ZeroGrad() {
  for (Parameter* p : params_) p->grad.setZero();
}

double AdamW::Step() {
  double sq = 0.0;
  for (const Parameter* p : params_) sq += p->grad.squaredNorm();
  const double norm = std::sqrt(sq);
  double clip = 1.0;
  if (options_.max_grad_norm > 0 && norm > options_.max_grad_norm) {
    clip = options_.max_grad_norm / (norm + 1e-12);
  }
  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const double lr = options_.learning_rate;
  for (Parameter* p : params_) {
    if (p->decay && options_.weight_decay > 0) {
      p->value *= 1.0 - lr * options_.weight_decay;
    }
    auto g = (p->grad * clip).array();
    p->adam_m.array() = b1 * p->adam_m.array() + (1.0 - b1) * g;
    p->adam_v.array() = b2 * p->adam_v.array() + (1.0 - b2) * g.square();
    p->value.array() -= lr * (p->adam_m.array() / bias1) /
                        ((p->adam_v.array() / bias2).sqrt() + options_.epsilon);
    p->grad.setZero();
  }
  return norm;
}

}  // namespace connshift::nn
