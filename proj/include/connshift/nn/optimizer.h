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

#ifndef CONNSHIFT_NN_OPTIMIZER_H_
#define CONNSHIFT_NN_OPTIMIZER_H_

#include <vector>

#include "connshift/nn/tape.h"

namespace connshift::nn {

struct AdamWOptions {
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;  // decoupled, skipped for decay=false params
  double max_grad_norm = 1.0;  // <= 0 disables clipping
};

// AdamW with decoupled weight decay and global gradient-norm clipping.
// Constant learning rate.
class AdamW {
 public:
  AdamW(std::vector<Parameter*> params, AdamWOptions options);

  // Applies one update from the accumulated gradients, then zeroes them.
  // Returns the pre-clipping global gradient norm.
  double Step();
  void ZeroGrad();
  long steps() const { return steps_; }

 private:
  std::vector<Parameter*> params_;
  AdamWOptions options_;
  long steps_ = 0;
};

}  // namespace connshift::nn

#endif  // CONNSHIFT_NN_OPTIMIZER_H_
