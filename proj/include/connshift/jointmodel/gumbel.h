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


// Gumbel-Softmax relaxation and the joint objective.

#ifndef CONNSHIFT_JOINTMODEL_GUMBEL_H_
#define CONNSHIFT_JOINTMODEL_GUMBEL_H_

#include <span>

#include <Eigen/Dense>

#include "connshift/nn/rng.h"
#include "connshift/nn/tape.h"

namespace connshift::jointmodel {

// Probabilities are clamped to this value before taking logarithms.
inline constexpr double kProbabilityFloor = 1e-12;

struct GumbelSample {
  Eigen::VectorXd c;   // relaxed one-hot, sums to 1
  Eigen::VectorXd xi;  // uniform draws behind the noise
};

// g = -log(-log(xi)) for each xi.
Eigen::VectorXd GumbelNoise(const Eigen::VectorXd& xi);
// CN uniform draws from the open interval (0, 1).
Eigen::VectorXd DrawUniform(int n, nn::Rng& rng);

// c_i = softmax((log p_i + g_i) / tau). Throws UsageError unless p is a
// probability vector and tau > 0.
GumbelSample SampleGumbel(std::span<const double> p, double tau, nn::Rng& rng);
// Same transform with explicit noise.
Eigen::VectorXd GumbelSoftmax(std::span<const double> p, double tau,
                              const Eigen::VectorXd& gumbel_noise);

// Differentiable version: `log_p` is a 1 x CN row of log-probabilities.
nn::Var GumbelSoftmax(nn::Var log_p, double tau,
                      const Eigen::VectorXd& gumbel_noise);

// -log(max(p[gold], floor)). Throws UsageError on an out-of-range index.
double CrossEntropy(std::span<const double> p, int gold);

// weight * conn_loss + rel_loss.
double CombineJointLoss(double conn_loss, double rel_loss, double weight = 0.5);

// weight * CE(p_conn, gold_conn) + CE(p_rel, gold_rel).
double JointLoss(std::span<const double> p_conn, int gold_conn,
                 std::span<const double> p_rel, int gold_rel,
                 double weight = 0.5);

// Shannon entropy in nats.
double Entropy(std::span<const double> p);

}  // namespace connshift::jointmodel

#endif  // CONNSHIFT_JOINTMODEL_GUMBEL_H_
