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


#include "connshift/encoder/classifier.h"

#include <cmath>
#include <numeric>

#include "connshift/corpus/scheme_json.h"
#include "connshift/error.h"
#include "connshift/hash.h"
#include "connshift/log.h"
#include "connshift/nn/checkpoint.h"
#include "connshift/nn/optimizer.h"

namespace connshift::encoder {

using nn::Matrix;
using nn::Parameter;
using nn::Var;

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (batch_size <= 0) throw ConfigError("batch_size must be > 0");
  if (max_epochs <= 0) throw ConfigError("max_epochs must be > 0");
  if (max_input_length <= 0) throw ConfigError("max_input_length must be > 0");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
}

EncoderClassifier::EncoderClassifier(corpus::LabelScheme scheme, Vocab vocab,
                                     const EncoderSpec& spec,
                                     std::uint64_t init_seed)
    : scheme_(std::move(scheme)), vocab_(std::move(vocab)) {
  if (scheme_.size() < 1) throw ConfigError("label scheme is empty");
  nn::Rng rng(init_seed);
  encoder_ = TransformerEncoder(spec, vocab_.size(), rng);
  head_weight_ = Parameter(
      "head_weight", RandomMatrix(spec.hidden_dim, scheme_.size(), 0.02, rng));
  head_bias_ = Parameter("head_bias", Matrix::Zero(1, scheme_.size()), false);
  max_input_length_ = spec.max_positions;
}

EncoderClassifier EncoderClassifier::ForCorpus(const corpus::Corpus& train,
                                               const EncoderSpec& spec,
                                               std::uint64_t init_seed) {
  return EncoderClassifier(train.scheme(), Vocab::Build(train.examples()), spec,
                           init_seed);
}

std::vector<Parameter*> EncoderClassifier::Parameters() {
  auto out = encoder_.Parameters();
  out.push_back(&head_weight_);
  out.push_back(&head_bias_);
  return out;
}

std::vector<const Parameter*> EncoderClassifier::Parameters() const {
  auto out = encoder_.Parameters();
  out.push_back(&head_weight_);
  out.push_back(&head_bias_);
  return out;
}

PackedInput EncoderClassifier::PackInput(
    std::span<const std::string> arg1, std::span<const std::string> arg2,
    const std::optional<std::string>& connective) const {
  return Pack(vocab_, arg1, arg2, connective,
              connective ? ConnectiveSlot::kConnective : ConnectiveSlot::kNone,
              max_input_length_);
}

std::pair<Var, Var> EncoderClassifier::Forward(nn::Tape& tape,
                                               const PackedInput& input) const {
  Var hidden = encoder_.Forward(tape, input.ids);
  Var rep = nn::Row(hidden, 0);
  Var logits = nn::AddRow(nn::MatMul(rep, tape.Param(head_weight_)),
                          tape.Param(head_bias_));
  return {logits, rep};
}

void EncoderClassifier::RequireTrained() const {
  if (!trained_) throw UsageError("model has not been trained or loaded");
}

TrainingLog EncoderClassifier::Train(const corpus::Corpus& train,
                                     const corpus::Corpus* dev,
                                     const TrainConfig& config,
                                     bool use_connective) {
  config.Validate();
  if (train.empty()) throw ConfigError("training corpus is empty");
  if (train.scheme().Fingerprint() != scheme_.Fingerprint()) {
    throw ConfigError("training corpus scheme '" + train.scheme().name() +
                      "' differs from the model scheme '" + scheme_.name() +
                      "'");
  }
  if (config.max_input_length > encoder_.spec().max_positions) {
    throw ConfigError("max_input_length exceeds the encoder's max_positions");
  }
  max_input_length_ = config.max_input_length;
  trained_ = true;

  std::vector<PackedInput> inputs;
  std::vector<int> labels;
  inputs.reserve(train.size());
  for (const auto& e : train.examples()) {
    inputs.push_back(PackInput(
        e.arg1, e.arg2, use_connective ? e.connective : std::nullopt));
    labels.push_back(train.LabelIndex(e));
  }

  auto params = Parameters();
  nn::AdamW optimizer(params, {.learning_rate = config.learning_rate,
                               .weight_decay = config.weight_decay,
                               .max_grad_norm = config.max_grad_norm});
  nn::Rng rng(config.seed);
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);

  const bool use_dev = dev != nullptr && !dev->empty();
  TrainingLog log;
  double best_dev = -1.0;
  std::vector<Matrix> best_values;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.Shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(
          order.size(), start + static_cast<std::size_t>(config.batch_size));
      const double inv = 1.0 / static_cast<double>(end - start);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        nn::Tape tape;
        Var logits = Forward(tape, inputs[i]).first;
        Var nll = nn::Pick(nn::LogSoftmaxRows(logits), 0, labels[i]);
        loss_sum -= nll.scalar();
        tape.Backward(nll, -inv);
      }
      optimizer.Step();
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(inputs.size());
    if (use_dev) {
      Metrics m = Evaluate(*this, *dev, use_connective);
      rec.dev_accuracy = m.accuracy;
      rec.dev_macro_f1 = m.macro_f1;
      if (m.accuracy > best_dev) {
        best_dev = m.accuracy;
        log.selected_epoch = epoch;
        best_values.clear();
        for (const Parameter* p : params) best_values.push_back(p->value);
      }
    } else {
      log.selected_epoch = epoch;
    }
    LogInfo("epoch " + std::to_string(epoch) + " loss " +
            std::to_string(rec.train_loss) +
            (rec.dev_accuracy ? " dev_acc " + std::to_string(*rec.dev_accuracy)
                              : std::string()));
    log.epochs.push_back(rec);
  }
  if (!best_values.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i]->value = std::move(best_values[i]);
    }
  }
  return log;
}

std::vector<double> EncoderClassifier::Probabilities(
    std::span<const std::string> arg1, std::span<const std::string> arg2,
    const std::optional<std::string>& connective) const {
  RequireTrained();
  nn::Tape tape(false);
  Var probs = nn::SoftmaxRows(Forward(tape, PackInput(arg1, arg2, connective)).first);
  const Matrix& v = probs.value();
  return std::vector<double>(v.data(), v.data() + v.size());
}

int EncoderClassifier::Predict(std::span<const std::string> arg1,
                               std::span<const std::string> arg2,
                               const std::optional<std::string>& connective) const {
  RequireTrained();
  nn::Tape tape(false);
  Var logits = Forward(tape, PackInput(arg1, arg2, connective)).first;
  Eigen::Index best = 0;
  logits.value().row(0).maxCoeff(&best);
  return static_cast<int>(best);
}

Eigen::VectorXd EncoderClassifier::GetRep(
    std::span<const std::string> arg1, std::span<const std::string> arg2,
    const std::optional<std::string>& connective) const {
  RequireTrained();
  nn::Tape tape(false);
  Var hidden = encoder_.Forward(tape, PackInput(arg1, arg2, connective).ids);
  return hidden.value().row(0).transpose();
}

int EncoderClassifier::Predict(const corpus::DiscourseExample& e,
                               bool with_connective) const {
  return Predict(e.arg1, e.arg2, with_connective ? e.connective : std::nullopt);
}

Eigen::VectorXd EncoderClassifier::GetRep(const corpus::DiscourseExample& e,
                                          bool with_connective) const {
  return GetRep(e.arg1, e.arg2, with_connective ? e.connective : std::nullopt);
}

void EncoderClassifier::Save(const std::filesystem::path& path) const {
  RequireTrained();
  const EncoderSpec& s = encoder_.spec();
  nlohmann::json header = {
      {"kind", "encoder-classifier"},
      {"encoder",
       {{"encoder_id", s.encoder_id},
        {"hidden_dim", s.hidden_dim},
        {"num_layers", s.num_layers},
        {"num_heads", s.num_heads},
        {"ffn_dim", s.ffn_dim},
        {"max_positions", s.max_positions}}},
      {"max_input_length", max_input_length_},
      {"scheme", corpus::SchemeToJson(scheme_)},
      {"vocab", vocab_.words()}};
  auto params = Parameters();
  nn::SaveCheckpoint(path, std::move(header), params);
}

namespace {

EncoderSpec SpecFromJson(const nlohmann::json& j) {
  EncoderSpec s;
  s.encoder_id = j.at("encoder_id").get<std::string>();
  s.hidden_dim = j.at("hidden_dim").get<int>();
  s.num_layers = j.at("num_layers").get<int>();
  s.num_heads = j.at("num_heads").get<int>();
  s.ffn_dim = j.at("ffn_dim").get<int>();
  s.max_positions = j.at("max_positions").get<int>();
  return s;
}

}  // namespace

EncoderClassifier EncoderClassifier::Load(const std::filesystem::path& path,
                                          const corpus::LabelScheme* expected) {
  nlohmann::json header = nn::ReadCheckpointHeader(path);
  if (header.value("kind", "") != "encoder-classifier") {
    throw DataError(path.string() + " is not a classifier checkpoint");
  }
  corpus::LabelScheme scheme = corpus::SchemeFromJson(header.at("scheme"));
  if (expected && expected->Fingerprint() != scheme.Fingerprint()) {
    throw DataError("checkpoint scheme fingerprint " +
                    HexDigest(scheme.Fingerprint()) +
                    " does not match the corpus scheme " +
                    HexDigest(expected->Fingerprint()));
  }
  EncoderClassifier model(
      std::move(scheme),
      Vocab(header.at("vocab").get<std::vector<std::string>>()),
      SpecFromJson(header.at("encoder")), 0);
  auto params = model.Parameters();
  nn::LoadCheckpoint(path, params);
  model.max_input_length_ = header.at("max_input_length").get<int>();
  model.trained_ = true;
  return model;
}

Metrics Evaluate(const EncoderClassifier& model, const corpus::Corpus& corpus,
                 bool use_connective, F1Average average) {
  if (corpus.scheme().Fingerprint() != model.scheme().Fingerprint()) {
    throw DataError("corpus scheme '" + corpus.scheme().name() +
                    "' does not match the model scheme '" +
                    model.scheme().name() + "'");
  }
  std::vector<int> gold, pred;
  gold.reserve(corpus.size());
  pred.reserve(corpus.size());
  for (const auto& e : corpus.examples()) {
    gold.push_back(corpus.LabelIndex(e));
    pred.push_back(model.Predict(e, use_connective));
  }
  return ComputeMetrics(gold, pred, model.scheme(), average);
}

}  // namespace connshift::encoder
