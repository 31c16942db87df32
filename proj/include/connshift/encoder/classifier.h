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


// Relation classifier: a transformer encoder with a linear layer over the
// hidden state of the sequence-initial token.

#ifndef CONNSHIFT_ENCODER_CLASSIFIER_H_
#define CONNSHIFT_ENCODER_CLASSIFIER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "connshift/corpus/types.h"
#include "connshift/encoder/metrics.h"
#include "connshift/encoder/transformer.h"
#include "connshift/encoder/vocab.h"
#include "connshift/nn/tape.h"

namespace connshift::encoder {

struct TrainConfig {
  double learning_rate = 1e-5;
  int batch_size = 16;
  int max_epochs = 10;
  int max_input_length = 256;
  std::uint64_t seed = 13;
  // AdamW decay, decoupled from the gradient step.
  double weight_decay = 0.01;
  double max_grad_norm = 1.0;

  // Throws ConfigError on a non-positive field.
  void Validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  std::optional<double> dev_accuracy;
  std::optional<double> dev_macro_f1;
};

struct TrainingLog {
  std::vector<EpochRecord> epochs;
  // Epoch whose parameters were kept (best dev accuracy, else the last).
  int selected_epoch = 0;
};

class EncoderClassifier {
 public:
  EncoderClassifier(corpus::LabelScheme scheme, Vocab vocab,
                    const EncoderSpec& spec, std::uint64_t init_seed);
  // Vocabulary built from `train`.
  static EncoderClassifier ForCorpus(const corpus::Corpus& train,
                                     const EncoderSpec& spec,
                                     std::uint64_t init_seed);

  // Mini-batch AdamW training on `train`. With use_connective, examples
  // that carry a connective see it between the arguments. When `dev` is
  // given and non-empty, the parameters of the best dev-accuracy epoch are
  // kept. Throws ConfigError on an empty corpus.
  TrainingLog Train(const corpus::Corpus& train, const corpus::Corpus* dev,
                    const TrainConfig& config, bool use_connective);

  // An absent and an empty connective give the same input sequence.
  std::vector<double> Probabilities(
      std::span<const std::string> arg1, std::span<const std::string> arg2,
      const std::optional<std::string>& connective) const;
  int Predict(std::span<const std::string> arg1,
              std::span<const std::string> arg2,
              const std::optional<std::string>& connective) const;
  // Hidden state at "<s>", length hidden_dim.
  Eigen::VectorXd GetRep(std::span<const std::string> arg1,
                         std::span<const std::string> arg2,
                         const std::optional<std::string>& connective) const;

  // Convenience overloads that read the example's own connective when
  // with_connective is set.
  int Predict(const corpus::DiscourseExample& e, bool with_connective) const;
  Eigen::VectorXd GetRep(const corpus::DiscourseExample& e,
                         bool with_connective) const;

  void Save(const std::filesystem::path& path) const;
  // Throws DataError when `expected` is given and its fingerprint differs
  // from the stored scheme.
  static EncoderClassifier Load(
      const std::filesystem::path& path,
      const corpus::LabelScheme* expected = nullptr);

  const corpus::LabelScheme& scheme() const { return scheme_; }
  const Vocab& vocab() const { return vocab_; }
  const TransformerEncoder& encoder() const { return encoder_; }
  const std::string& encoder_id() const { return encoder_.spec().encoder_id; }
  int hidden_dim() const { return encoder_.hidden_dim(); }
  int num_labels() const { return scheme_.size(); }
  bool trained() const { return trained_; }
  int max_input_length() const { return max_input_length_; }

  std::vector<nn::Parameter*> Parameters();
  std::vector<const nn::Parameter*> Parameters() const;

 private:
  PackedInput PackInput(std::span<const std::string> arg1,
                        std::span<const std::string> arg2,
                        const std::optional<std::string>& connective) const;
  // Returns (1 x num_labels logits, 1 x hidden representation).
  std::pair<nn::Var, nn::Var> Forward(nn::Tape& tape,
                                      const PackedInput& input) const;
  void RequireTrained() const;

  corpus::LabelScheme scheme_;
  Vocab vocab_;
  TransformerEncoder encoder_;
  nn::Parameter head_weight_;
  nn::Parameter head_bias_;
  int max_input_length_ = 256;
  bool trained_ = false;
};

// Scores `model` on every example of `corpus`.
Metrics Evaluate(const EncoderClassifier& model, const corpus::Corpus& corpus,
                 bool use_connective, F1Average average = F1Average::kPresent);

}  // namespace connshift::encoder

#endif  // CONNSHIFT_ENCODER_CLASSIFIER_H_
