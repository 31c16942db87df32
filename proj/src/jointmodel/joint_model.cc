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


#include "connshift/jointmodel/joint_model.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "connshift/corpus/inventory.h"
#include "connshift/corpus/scheme_json.h"
#include "connshift/error.h"
#include "connshift/hash.h"
#include "connshift/log.h"
#include "connshift/nn/checkpoint.h"
#include "connshift/nn/optimizer.h"

namespace connshift::jointmodel {

using encoder::PackedInput;
using nn::Matrix;
using nn::Parameter;
using nn::Var;

std::string_view ToString(DevSelection s) {
  return s == DevSelection::kImplicitDev ? "implicit_dev" : "dev_loss";
}

DevSelection DevSelectionFromString(std::string_view s) {
  if (s == "implicit_dev") return DevSelection::kImplicitDev;
  if (s == "dev_loss") return DevSelection::kDevLoss;
  throw ConfigError("unknown dev selection '" + std::string(s) +
                    "' (expected implicit_dev or dev_loss)");
}

std::vector<std::string> ConnectiveVocabulary(const corpus::Corpus& corpus) {
  std::map<std::string, int> counts;
  for (const auto& e : corpus.examples()) {
    if (!e.connective) continue;
    std::string s = corpus::NormalizeSurface(*e.connective);
    if (!s.empty()) ++counts[s];
  }
  std::vector<std::pair<std::string, int>> sorted(counts.begin(), counts.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (auto& [s, n] : sorted) out.push_back(s);
  return out;
}

std::uint64_t ConnectiveVocabularyFingerprint(
    std::span<const std::string> connectives) {
  Fnv1a64 h;
  for (const auto& c : connectives) h.Field(c);
  return h.digest();
}

JointModel::JointModel(corpus::LabelScheme scheme, encoder::Vocab vocab,
                       std::vector<std::string> connectives,
                       const encoder::EncoderSpec& spec, std::uint64_t init_seed,
                       double temperature, double loss_weight)
    : scheme_(std::move(scheme)),
      vocab_(std::move(vocab)),
      connectives_(std::move(connectives)),
      temperature_(temperature),
      loss_weight_(loss_weight) {
  if (connectives_.size() < 2) {
    throw ConfigError("the connective vocabulary needs at least two entries");
  }
  if (!(temperature_ > 0.0)) throw ConfigError("temperature must be > 0");
  if (scheme_.size() < 1) throw ConfigError("label scheme is empty");
  for (std::size_t i = 0; i < connectives_.size(); ++i) {
    if (!connective_index_.emplace(connectives_[i], static_cast<int>(i)).second) {
      throw ConfigError("duplicate connective '" + connectives_[i] + "'");
    }
  }
  nn::Rng rng(init_seed);
  encoder_ = encoder::TransformerEncoder(spec, vocab_.size(), rng);
  const int d = spec.hidden_dim;
  const int cn = num_connectives();
  conn_weight_ = Parameter("connective_head_weight",
                           encoder::RandomMatrix(d, cn, 0.02, rng));
  conn_bias_ = Parameter("connective_head_bias", Matrix::Zero(1, cn), false);
  rel_weight_ = Parameter("relation_head_weight",
                          encoder::RandomMatrix(d, scheme_.size(), 0.02, rng));
  rel_bias_ = Parameter("relation_head_bias", Matrix::Zero(1, scheme_.size()), false);
  Matrix table(cn, d);
  const Matrix& tokens = encoder_.token_embedding().value;
  for (int i = 0; i < cn; ++i) {
    auto words = corpus::Tokenize(connectives_[i]);
    auto ids = vocab_.Ids(words);
    table.row(i).setZero();
    for (int id : ids) table.row(i) += tokens.row(id);
    table.row(i) /= static_cast<double>(std::max<std::size_t>(ids.size(), 1));
  }
  conn_embeddings_ = Parameter("connective_embeddings", std::move(table));
  max_input_length_ = spec.max_positions;
}

JointModel JointModel::ForCorpus(const corpus::Corpus& train,
                                 const encoder::EncoderSpec& spec,
                                 std::uint64_t init_seed, double temperature,
                                 double loss_weight) {
  return JointModel(train.scheme(), encoder::Vocab::Build(train.examples()),
                    ConnectiveVocabulary(train), spec, init_seed, temperature,
                    loss_weight);
}

std::vector<Parameter*> JointModel::Parameters() {
  auto out = encoder_.Parameters();
  for (Parameter* p : {&conn_weight_, &conn_bias_, &rel_weight_, &rel_bias_,
                       &conn_embeddings_}) {
    out.push_back(p);
  }
  return out;
}

std::vector<const Parameter*> JointModel::Parameters() const {
  auto mutable_params = const_cast<JointModel*>(this)->Parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

int JointModel::ConnectiveIndex(std::string_view surface) const {
  auto it = connective_index_.find(corpus::NormalizeSurface(surface));
  return it == connective_index_.end() ? -1 : it->second;
}

PackedInput JointModel::PackMasked(std::span<const std::string> arg1,
                                   std::span<const std::string> arg2) const {
  return encoder::Pack(vocab_, arg1, arg2, std::nullopt,
                       encoder::ConnectiveSlot::kMask, max_input_length_);
}

std::pair<Var, Var> JointModel::ConnectivePass(nn::Tape& tape,
                                               const PackedInput& in) const {
  Var tokens = encoder_.TokenEmbeddings(tape, in.ids);
  Var hidden = encoder_.Encode(tape, tokens);
  Var h_mask = nn::Row(hidden, in.connective_position);
  Var logits = nn::AddRow(nn::MatMul(h_mask, tape.Param(conn_weight_)),
                          tape.Param(conn_bias_));
  return {tokens, logits};
}

Var JointModel::RelationLogits(nn::Tape& tape, Var token_embeddings,
                               const PackedInput& in, Var slot) const {
  Var spliced = nn::ReplaceRow(token_embeddings, in.connective_position, slot);
  Var hidden = encoder_.Encode(tape, spliced);
  return nn::AddRow(nn::MatMul(nn::Row(hidden, 0), tape.Param(rel_weight_)),
                    tape.Param(rel_bias_));
}

namespace {

std::vector<double> RowVector(const Matrix& m) {
  return std::vector<double>(m.data(), m.data() + m.size());
}

}  // namespace

std::vector<double> JointModel::ForwardConnective(
    std::span<const std::string> arg1, std::span<const std::string> arg2) const {
  nn::Tape tape(false);
  Var logits = ConnectivePass(tape, PackMasked(arg1, arg2)).second;
  return RowVector(nn::SoftmaxRows(logits).value());
}

std::vector<double> JointModel::ForwardRelation(
    std::span<const std::string> arg1, const Eigen::VectorXd& c,
    std::span<const std::string> arg2) const {
  if (c.size() != num_connectives()) {
    throw UsageError("mixture length differs from the connective vocabulary");
  }
  nn::Tape tape(false);
  PackedInput in = PackMasked(arg1, arg2);
  Var tokens = encoder_.TokenEmbeddings(tape, in.ids);
  Var slot = nn::MatMul(tape.Constant(c.transpose()), tape.Param(conn_embeddings_));
  return RowVector(nn::SoftmaxRows(RelationLogits(tape, tokens, in, slot)).value());
}

std::vector<double> JointModel::ForwardRelationHard(
    std::span<const std::string> arg1, int k,
    std::span<const std::string> arg2) const {
  if (k < 0 || k >= num_connectives()) throw UsageError("connective out of range");
  nn::Tape tape(false);
  PackedInput in = PackMasked(arg1, arg2);
  Var tokens = encoder_.TokenEmbeddings(tape, in.ids);
  Var slot = nn::Row(tape.Param(conn_embeddings_), k);
  return RowVector(nn::SoftmaxRows(RelationLogits(tape, tokens, in, slot)).value());
}

int JointModel::PredictConnective(std::span<const std::string> arg1,
                                  std::span<const std::string> arg2) const {
  nn::Tape tape(false);
  Var logits = ConnectivePass(tape, PackMasked(arg1, arg2)).second;
  Eigen::Index k = 0;
  logits.value().row(0).maxCoeff(&k);
  return static_cast<int>(k);
}

int JointModel::PredictJoint(std::span<const std::string> arg1,
                             std::span<const std::string> arg2) const {
  nn::Tape tape(false);
  PackedInput in = PackMasked(arg1, arg2);
  auto [tokens, conn_logits] = ConnectivePass(tape, in);
  Eigen::Index k = 0;
  conn_logits.value().row(0).maxCoeff(&k);
  Var slot = nn::Row(tape.Param(conn_embeddings_), k);
  Var logits = RelationLogits(tape, tokens, in, slot);
  Eigen::Index r = 0;
  logits.value().row(0).maxCoeff(&r);
  return static_cast<int>(r);
}

JointModel::LossTerms JointModel::BuildLoss(
    nn::Tape& tape, std::span<const std::string> arg1,
    std::span<const std::string> arg2, int gold_conn, int gold_rel,
    const Eigen::VectorXd& gumbel_noise, double loss_weight) const {
  if (gold_conn >= num_connectives()) {
    throw UsageError("gold connective index out of range");
  }
  if (gold_rel < 0 || gold_rel >= scheme_.size()) {
    throw UsageError("gold relation index out of range");
  }
  PackedInput in = PackMasked(arg1, arg2);
  auto [tokens, conn_logits] = ConnectivePass(tape, in);
  LossTerms t;
  Var conn_log_p = nn::LogSoftmaxRows(conn_logits);
  t.connective_probs = nn::SoftmaxRows(conn_logits);
  t.mixture = GumbelSoftmax(conn_log_p, temperature_, gumbel_noise);
  Var slot = nn::MatMul(t.mixture, tape.Param(conn_embeddings_));
  Var rel_logits = RelationLogits(tape, tokens, in, slot);
  t.relation_probs = nn::SoftmaxRows(rel_logits);
  t.relation_loss = nn::Scale(nn::Pick(nn::LogSoftmaxRows(rel_logits), 0, gold_rel), -1.0);
  t.total = t.relation_loss;
  if (gold_conn >= 0) {
    t.connective_loss = nn::Scale(nn::Pick(conn_log_p, 0, gold_conn), -1.0);
    t.total = nn::Add(t.relation_loss, nn::Scale(t.connective_loss, loss_weight));
  }
  return t;
}

encoder::TrainingLog JointModel::Train(const corpus::Corpus& train,
                                       const corpus::Corpus* implicit_dev,
                                       const corpus::Corpus* explicit_dev,
                                       const JointConfig& config) {
  config.train.Validate();
  if (!(config.temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (train.empty()) throw ConfigError("training corpus is empty");
  if (train.scheme().Fingerprint() != scheme_.Fingerprint()) {
    throw ConfigError("training corpus scheme differs from the model scheme");
  }
  if (config.train.max_input_length > encoder_.spec().max_positions) {
    throw ConfigError("max_input_length exceeds the encoder's max_positions");
  }
  temperature_ = config.temperature;
  loss_weight_ = config.loss_weight;
  max_input_length_ = config.train.max_input_length;

  std::vector<int> gold_conn, gold_rel;
  for (const auto& e : train.examples()) {
    if (!e.connective || e.connective->empty()) {
      throw DataError("example " + e.id + " has no gold connective");
    }
    const int k = ConnectiveIndex(*e.connective);
    if (k < 0) {
      throw DataError("connective '" + *e.connective + "' of example " + e.id +
                      " is not in the connective vocabulary");
    }
    gold_conn.push_back(k);
    gold_rel.push_back(train.LabelIndex(e));
  }
  trained_ = true;

  auto params = Parameters();
  nn::AdamW optimizer(params, {.learning_rate = config.train.learning_rate,
                               .weight_decay = config.train.weight_decay,
                               .max_grad_norm = config.train.max_grad_norm});
  nn::Rng rng(config.train.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  const bool use_implicit = config.selection == DevSelection::kImplicitDev &&
                            implicit_dev && !implicit_dev->empty();
  const bool use_loss = !use_implicit && explicit_dev && !explicit_dev->empty();
  const Eigen::VectorXd zero_noise = Eigen::VectorXd::Zero(num_connectives());

  encoder::TrainingLog log;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<Matrix> best_values;

  for (int epoch = 1; epoch <= config.train.max_epochs; ++epoch) {
    rng.Shuffle(order);
    double loss_sum = 0.0;
    const auto batch = static_cast<std::size_t>(config.train.batch_size);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const double inv = 1.0 / static_cast<double>(end - start);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        const auto& e = train[i];
        Eigen::VectorXd noise = GumbelNoise(DrawUniform(num_connectives(), rng));
        nn::Tape tape;
        LossTerms terms = BuildLoss(tape, e.arg1, e.arg2, gold_conn[i],
                                    gold_rel[i], noise, loss_weight_);
        loss_sum += terms.total.scalar();
        tape.Backward(terms.total, inv);
      }
      optimizer.Step();
    }
    encoder::EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(train.size());
    double score = 0.0;
    bool scored = false;
    if (use_implicit) {
      encoder::Metrics m = EvaluateJoint(*this, *implicit_dev);
      rec.dev_accuracy = m.accuracy;
      rec.dev_macro_f1 = m.macro_f1;
      score = m.macro_f1;
      scored = true;
    } else if (use_loss) {
      double dev_loss = 0.0;
      for (const auto& e : explicit_dev->examples()) {
        nn::Tape tape(false);
        const int k = e.connective ? ConnectiveIndex(*e.connective) : -1;
        dev_loss += BuildLoss(tape, e.arg1, e.arg2, k, explicit_dev->LabelIndex(e),
                              zero_noise, loss_weight_)
                        .total.scalar();
      }
      score = -dev_loss / static_cast<double>(explicit_dev->size());
      scored = true;
    }
    if (!scored || score > best) {
      best = score;
      log.selected_epoch = epoch;
      if (scored) {
        best_values.clear();
        for (const Parameter* p : params) best_values.push_back(p->value);
      }
    }
    LogInfo("joint epoch " + std::to_string(epoch) + " loss " +
            std::to_string(rec.train_loss));
    log.epochs.push_back(rec);
  }
  if (!best_values.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i]->value = std::move(best_values[i]);
    }
  }
  return log;
}

void JointModel::Save(const std::filesystem::path& path) const {
  const encoder::EncoderSpec& s = encoder_.spec();
  nlohmann::json header = {
      {"kind", "joint-model"},
      {"encoder",
       {{"encoder_id", s.encoder_id},
        {"hidden_dim", s.hidden_dim},
        {"num_layers", s.num_layers},
        {"num_heads", s.num_heads},
        {"ffn_dim", s.ffn_dim},
        {"max_positions", s.max_positions}}},
      {"max_input_length", max_input_length_},
      {"scheme", corpus::SchemeToJson(scheme_)},
      {"vocab", vocab_.words()},
      {"connectives", connectives_},
      {"connective_fingerprint",
       HexDigest(ConnectiveVocabularyFingerprint(connectives_))},
      {"temperature", temperature_},
      {"loss_weight", loss_weight_},
      {"trained", trained_}};
  auto params = Parameters();
  nn::SaveCheckpoint(path, std::move(header), params);
}

JointModel JointModel::Load(const std::filesystem::path& path,
                            const corpus::LabelScheme* expected_scheme,
                            std::optional<std::uint64_t> expected_vocab) {
  nlohmann::json header = nn::ReadCheckpointHeader(path);
  if (header.value("kind", "") != "joint-model") {
    throw DataError(path.string() + " is not a joint-model checkpoint");
  }
  corpus::LabelScheme scheme = corpus::SchemeFromJson(header.at("scheme"));
  if (expected_scheme && expected_scheme->Fingerprint() != scheme.Fingerprint()) {
    throw DataError("checkpoint scheme does not match the corpus scheme");
  }
  auto connectives = header.at("connectives").get<std::vector<std::string>>();
  const std::uint64_t fp = ConnectiveVocabularyFingerprint(connectives);
  if (HexDigest(fp) != header.at("connective_fingerprint").get<std::string>()) {
    throw DataError("connective vocabulary fingerprint mismatch in " +
                    path.string());
  }
  if (expected_vocab && *expected_vocab != fp) {
    throw DataError("checkpoint connective vocabulary differs from the expected one");
  }
  const auto& enc = header.at("encoder");
  encoder::EncoderSpec spec;
  spec.encoder_id = enc.at("encoder_id").get<std::string>();
  spec.hidden_dim = enc.at("hidden_dim").get<int>();
  spec.num_layers = enc.at("num_layers").get<int>();
  spec.num_heads = enc.at("num_heads").get<int>();
  spec.ffn_dim = enc.at("ffn_dim").get<int>();
  spec.max_positions = enc.at("max_positions").get<int>();
  JointModel model(std::move(scheme),
                   encoder::Vocab(header.at("vocab").get<std::vector<std::string>>()),
                   std::move(connectives), spec, 0,
                   header.at("temperature").get<double>(),
                   header.at("loss_weight").get<double>());
  auto params = model.Parameters();
  nn::LoadCheckpoint(path, params);
  model.max_input_length_ = header.at("max_input_length").get<int>();
  model.trained_ = header.value("trained", true);
  return model;
}

encoder::Metrics EvaluateJoint(const JointModel& model,
                               const corpus::Corpus& corpus,
                               encoder::F1Average average) {
  if (corpus.scheme().Fingerprint() != model.scheme().Fingerprint()) {
    throw DataError("corpus scheme does not match the model scheme");
  }
  std::vector<int> gold, pred;
  for (const auto& e : corpus.examples()) {
    gold.push_back(corpus.LabelIndex(e));
    pred.push_back(model.PredictJoint(e.arg1, e.arg2));
  }
  return encoder::ComputeMetrics(gold, pred, model.scheme(), average);
}

}  // namespace connshift::jointmodel
