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


// Connective-ablation shift measurement: train an argument-only classifier,
// then compare its predictions and "<s>" representations with and without
// each example's connective.

#ifndef CONNSHIFT_SHIFTMETRIC_SHIFT_H_
#define CONNSHIFT_SHIFTMETRIC_SHIFT_H_

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "connshift/corpus/types.h"
#include "connshift/encoder/classifier.h"

namespace connshift::shiftmetric {

struct ShiftResult {
  int diff_num = 0;
  // cosine(v_without, v_with) per example, input order, in [-1, 1].
  std::vector<double> scores;
  std::size_t n = 0;
  std::vector<std::string> ids;
  std::vector<int> pred_without;
  std::vector<int> pred_with;
};

// Builds an untrained classifier for the given corpus.
using ModelFactory =
    std::function<encoder::EncoderClassifier(const corpus::Corpus&)>;

// Cosine similarity of raw vectors. Throws UndefinedError for a zero
// vector.
double Cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Scores every example of `corpus` with an already trained model.
// Throws DataError naming the first example without a connective.
ShiftResult ScoreShift(const encoder::EncoderClassifier& model,
                       const corpus::Corpus& corpus);

// Trains a fresh model from `factory` on the arguments and labels of
// `corpus` (connectives withheld, no held-out split) and scores the same
// corpus. The trained model is returned through `trained` when non-null.
ShiftResult MeasureLabelShift(const ModelFactory& factory,
                              const corpus::Corpus& corpus,
                              const encoder::TrainConfig& config,
                              encoder::EncoderClassifier* trained = nullptr,
                              encoder::TrainingLog* log = nullptr);

// diff_num / n. Throws UndefinedError when n == 0.
double ShiftRate(const ShiftResult& result);

// Fraction of scores strictly below `threshold`. Throws UndefinedError on
// empty input.
double FractionBelow(std::span<const double> scores, double threshold = 0.5);

struct RelationBreakdown {
  std::size_t n = 0;
  int diff_num = 0;
  double shift_rate = 0.0;
  double mean_score = 0.0;
  double fraction_below = 0.0;
};

// Per-label view of a result; `corpus` must be the scored corpus.
std::map<std::string, RelationBreakdown> BreakdownByRelation(
    const corpus::Corpus& corpus, const ShiftResult& result,
    double threshold = 0.5);

struct RepresentationExport {
  nn::Matrix rows;  // n x hidden_dim
  std::vector<std::string> ids;
  std::vector<std::string> labels;
  bool with_connective = false;
};

RepresentationExport ExportRepresentations(
    const encoder::EncoderClassifier& model, const corpus::Corpus& corpus,
    bool with_connective);

// Score file columns: example_id, label, p_without, p_with, cosine.
// Predictions are written as label names.
void WriteScoreFile(std::ostream& out, const corpus::Corpus& corpus,
                    const ShiftResult& result);
void WriteScoreFile(const std::filesystem::path& path,
                    const corpus::Corpus& corpus, const ShiftResult& result);
// example_id -> cosine. Throws IoError / DataError.
std::map<std::string, double> ReadScoreFile(const std::filesystem::path& path);

// Writes <stem>.tsv (id, label, v_0 .. v_{d-1}) and <stem>.json holding
// n, hidden_dim and the condition.
void WriteRepresentations(const std::filesystem::path& stem,
                          const RepresentationExport& data);

}  // namespace connshift::shiftmetric

#endif  // CONNSHIFT_SHIFTMETRIC_SHIFT_H_
