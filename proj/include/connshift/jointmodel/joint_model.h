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


// Joint connective recovery and relation classification. A first encoder
// pass predicts a connective at a mask placed between the arguments; a
// Gumbel-Softmax sample mixes the connective embeddings into the mask slot
// and a second pass classifies the relation from the "<s>" state.

#ifndef CONNSHIFT_JOINTMODEL_JOINT_MODEL_H_
#define CONNSHIFT_JOINTMODEL_JOINT_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "connshift/corpus/types.h"
#include "connshift/encoder/classifier.h"
#include "connshift/encoder/metrics.h"
#include "connshift/encoder/transformer.h"
#include "connshift/encoder/vocab.h"
#include "connshift/jointmodel/gumbel.h"
#include "connshift/nn/tape.h"

namespace connshift::jointmodel {

enum class DevSelection {
  kImplicitDev,  // best macro-F1 of PredictJoint on implicit dev data
  kDevLoss,      // lowest noise-free joint loss on explicit dev data
};

std::string_view ToString(DevSelection s);
DevSelection DevSelectionFromString(std::string_view s);

struct JointConfig {
  encoder::TrainConfig train;
  double temperature = 1.0;
  double loss_weight = 0.5;
  DevSelection selection = DevSelection::kImplicitDev;
};

// Distinct connectives of `corpus`, most frequent first, ties broken
// alphabetically. Surfaces are normalized.
std::vector<std::string> ConnectiveVocabulary(const corpus::Corpus& corpus);
std::uint64_t ConnectiveVocabularyFingerprint(
    std::span<const std::string> connectives);

class JointModel {
 public:
  // Throws ConfigError when fewer than two connectives are given or the
  // temperature is not positive.
  JointModel(corpus::LabelScheme scheme, encoder::Vocab vocab,
             std::vector<std::string> connectives,
             const encoder::EncoderSpec& spec, std::uint64_t init_seed,
             double temperature = 1.0, double loss_weight = 0.5);
  // Vocabulary and connective inventory taken from `train`.
  static JointModel ForCorpus(const corpus::Corpus& train,
                              const encoder::EncoderSpec& spec,
                              std::uint64_t init_seed, double temperature = 1.0,
                              double loss_weight = 0.5);

  // p^c over the connective vocabulary from the mask-position state.
  std::vector<double> ForwardConnective(std::span<const std::string> arg1,
                                        std::span<const std::string> arg2) const;
  // p^r with the mask embedding replaced by sum_i c_i * E_conn[i].
  std::vector<double> ForwardRelation(std::span<const std::string> arg1,
                                      const Eigen::VectorXd& c,
                                      std::span<const std::string> arg2) const;
  // p^r with connective k's embedding spliced into the mask slot.
  std::vector<double> ForwardRelationHard(std::span<const std::string> arg1,
                                          int k,
                                          std::span<const std::string> arg2) const;
  // Mask pass, argmax connective splice, argmax relation. No noise.
  int PredictJoint(std::span<const std::string> arg1,
                   std::span<const std::string> arg2) const;
  int PredictConnective(std::span<const std::string> arg1,
                        std::span<const std::string> arg2) const;

  struct LossTerms {
    nn::Var total;
    nn::Var connective_loss;  // -log p^c[gold_conn]; absent when gold_conn < 0
    nn::Var relation_loss;    // -log p^r[gold_rel]
    nn::Var connective_probs;
    nn::Var relation_probs;
    nn::Var mixture;          // Gumbel sample c
  };
  // Builds both passes on `tape` with the given Gumbel noise (length CN).
  // A negative gold_conn omits the connective term.
  LossTerms BuildLoss(nn::Tape& tape, std::span<const std::string> arg1,
                      std::span<const std::string> arg2, int gold_conn,
                      int gold_rel, const Eigen::VectorXd& gumbel_noise,
                      double loss_weight) const;

  // End-to-end training of weight * L_conn + L_rel. Every training example
  // needs a connective (DataError otherwise). Selection follows
  // config.selection, falling back to dev loss and then to the last epoch
  // when the needed dev data is absent.
  encoder::TrainingLog Train(const corpus::Corpus& train,
                             const corpus::Corpus* implicit_dev,
                             const corpus::Corpus* explicit_dev,
                             const JointConfig& config);

  // Index of a normalized connective surface, or -1.
  int ConnectiveIndex(std::string_view surface) const;

  void Save(const std::filesystem::path& path) const;
  // Verifies the scheme and, when given, the connective vocabulary
  // fingerprint. Throws DataError on mismatch.
  static JointModel Load(const std::filesystem::path& path,
                         const corpus::LabelScheme* expected_scheme = nullptr,
                         std::optional<std::uint64_t> expected_vocab = std::nullopt);

  const corpus::LabelScheme& scheme() const { return scheme_; }
  const encoder::Vocab& vocab() const { return vocab_; }
  const std::vector<std::string>& connectives() const { return connectives_; }
  int num_connectives() const { return static_cast<int>(connectives_.size()); }
  double temperature() const { return temperature_; }
  double loss_weight() const { return loss_weight_; }
  int hidden_dim() const { return encoder_.hidden_dim(); }
  bool trained() const { return trained_; }
  const encoder::TransformerEncoder& encoder() const { return encoder_; }

  nn::Parameter& connective_head_weight() { return conn_weight_; }
  nn::Parameter& connective_head_bias() { return conn_bias_; }
  nn::Parameter& relation_head_weight() { return rel_weight_; }
  nn::Parameter& connective_embeddings() { return conn_embeddings_; }
  std::vector<nn::Parameter*> Parameters();
  std::vector<const nn::Parameter*> Parameters() const;

 private:
  encoder::PackedInput PackMasked(std::span<const std::string> arg1,
                                  std::span<const std::string> arg2) const;
  // Pass 1: returns (token embeddings, connective logits).
  std::pair<nn::Var, nn::Var> ConnectivePass(nn::Tape& tape,
                                             const encoder::PackedInput& in) const;
  // Pass 2 given a 1 x hidden mask-slot embedding.
  nn::Var RelationLogits(nn::Tape& tape, nn::Var token_embeddings,
                         const encoder::PackedInput& in, nn::Var slot) const;

  corpus::LabelScheme scheme_;
  encoder::Vocab vocab_;
  std::vector<std::string> connectives_;
  std::unordered_map<std::string, int> connective_index_;
  encoder::TransformerEncoder encoder_;
  nn::Parameter conn_weight_, conn_bias_;
  nn::Parameter rel_weight_, rel_bias_;
  nn::Parameter conn_embeddings_;
  double temperature_ = 1.0;
  double loss_weight_ = 0.5;
  int max_input_length_ = 256;
  bool trained_ = false;
};

// Macro-F1 and accuracy of PredictJoint on `corpus`.
encoder::Metrics EvaluateJoint(const JointModel& model,
                               const corpus::Corpus& corpus,
                               encoder::F1Average average =
                                   encoder::F1Average::kPresent);

}  // namespace connshift::jointmodel

#endif  // CONNSHIFT_JOINTMODEL_JOINT_MODEL_H_
