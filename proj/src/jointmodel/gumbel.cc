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


#include "connshift/jointmodel/gumbel.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "connshift/error.h"

namespace connshift::jointmodel {

Eigen::VectorXd GumbelNoise(const Eigen::VectorXd& xi) {
  return xi.unaryExpr([](double u) { return -std::log(-std::log(u)); });
}

Eigen::VectorXd DrawUniform(int n, nn::Rng& rng) {
  Eigen::VectorXd xi(n);
  for (int i = 0; i < n; ++i) xi(i) = rng.OpenUniform();
  return xi;
}

namespace {

void CheckDistribution(std::span<const double> p) {
  if (p.empty()) throw UsageError("empty probability vector");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw UsageError("negative or NaN probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw UsageError("probabilities sum to " + std::to_string(sum));
  }
}

}  // namespace

Eigen::VectorXd GumbelSoftmax(std::span<const double> p, double tau,
                              const Eigen::VectorXd& gumbel_noise) {
  CheckDistribution(p);
  if (!(tau > 0.0)) throw UsageError("temperature must be positive");
  if (gumbel_noise.size() != static_cast<Eigen::Index>(p.size())) {
    throw UsageError("noise length differs from the distribution");
  }
  Eigen::VectorXd z(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    z(i) = (std::log(std::max(p[i], kProbabilityFloor)) + gumbel_noise(i)) / tau;
  }
  z.array() -= z.maxCoeff();
  z = z.array().exp().matrix();
  return z / z.sum();
}

GumbelSample SampleGumbel(std::span<const double> p, double tau, nn::Rng& rng) {
  GumbelSample s;
  s.xi = DrawUniform(static_cast<int>(p.size()), rng);
  s.c = GumbelSoftmax(p, tau, GumbelNoise(s.xi));
  return s;
}

nn::Var GumbelSoftmax(nn::Var log_p, double tau,
                      const Eigen::VectorXd& gumbel_noise) {
  if (!(tau > 0.0)) throw UsageError("temperature must be positive");
  if (log_p.rows() != 1 || log_p.cols() != gumbel_noise.size()) {
    throw UsageError("noise length differs from the distribution");
  }
  nn::Tape& t = log_p.tape();
  nn::Var clamped = nn::ClampMin(log_p, std::log(kProbabilityFloor));
  nn::Var noisy = nn::Add(clamped, t.Constant(gumbel_noise.transpose()));
  return nn::SoftmaxRows(nn::Scale(noisy, 1.0 / tau));
}

double CrossEntropy(std::span<const double> p, int gold) {
  if (gold < 0 || static_cast<std::size_t>(gold) >= p.size()) {
    throw UsageError("gold index " + std::to_string(gold) + " out of range");
  }
  return -std::log(std::max(p[gold], kProbabilityFloor));
}

double CombineJointLoss(double conn_loss, double rel_loss, double weight) {
  return weight * conn_loss + rel_loss;
}

double JointLoss(std::span<const double> p_conn, int gold_conn,
                 std::span<const double> p_rel, int gold_rel, double weight) {
  return CombineJointLoss(CrossEntropy(p_conn, gold_conn),
                          CrossEntropy(p_rel, gold_rel), weight);
}

double Entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

}  // namespace connshift::jointmodel
