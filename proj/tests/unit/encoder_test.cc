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

#include <chrono>
#include <cmath>
#include <filesystem>

#include "connshift/encoder/classifier.h"
#include "connshift/encoder/metrics.h"
#include "connshift/encoder/vocab.h"
#include "connshift/error.h"
#include "connshift/nn/rng.h"

namespace connshift::encoder {
namespace {

using corpus::Corpus;
using corpus::DiscourseExample;
using corpus::LabelScheme;
using corpus::SchemeLevel;
using corpus::Split;
using corpus::Tokens;

const LabelScheme& ToyScheme() {
  static const LabelScheme s("toy", SchemeLevel::kTop, {"contrast", "other"});
  return s;
}

// Label is "contrast" iff arg2 contains "but".
std::vector<DiscourseExample> ButTask(int n, std::uint64_t seed, Split split) {
  static const std::vector<std::string> kFiller = {
      "the", "cat", "sat", "on", "mat", "dog", "ran", "far", "away", "from",
      "home", "it", "was", "late", "rain", "fell", "all", "day", "we", "left"};
  nn::Rng rng(seed);
  std::vector<DiscourseExample> out;
  for (int i = 0; i < n; ++i) {
    DiscourseExample e;
    e.id = "toy" + std::to_string(i);
    e.split = split;
    const int n1 = 3 + static_cast<int>(rng.Index(4));
    const int n2 = 3 + static_cast<int>(rng.Index(4));
    for (int k = 0; k < n1; ++k) e.arg1.push_back(kFiller[rng.Index(kFiller.size())]);
    for (int k = 0; k < n2; ++k) e.arg2.push_back(kFiller[rng.Index(kFiller.size())]);
    const bool contrast = i % 2 == 0;
    if (contrast) {
      e.arg2.insert(e.arg2.begin() + static_cast<long>(rng.Index(e.arg2.size() + 1)),
                    "but");
    }
    e.relation_top = contrast ? "contrast" : "other";
    out.push_back(e);
  }
  return out;
}

EncoderSpec TinySpec() { return EncoderSpec{}; }

TrainConfig ToyConfig() {
  TrainConfig c;
  c.learning_rate = 1e-3;
  c.max_epochs = 10;
  return c;
}

TEST_CASE("metrics on a hand-built three-class confusion") {
  LabelScheme s("abc", SchemeLevel::kTop, {"a", "b", "c"});
  // gold a a a b b c ; pred a a b b c c
  std::vector<int> gold = {0, 0, 0, 1, 1, 2};
  std::vector<int> pred = {0, 0, 1, 1, 2, 2};
  Metrics m = ComputeMetrics(gold, pred, s);
  // a: tp2 gold3 pred2 -> 4/5; b: tp1 gold2 pred2 -> 1/2; c: tp1 gold1 pred2 -> 2/3
  CHECK(m.accuracy == doctest::Approx(4.0 / 6.0));
  CHECK(m.per_label_f1["a"] == doctest::Approx(0.8));
  CHECK(m.per_label_f1["b"] == doctest::Approx(0.5));
  CHECK(m.per_label_f1["c"] == doctest::Approx(2.0 / 3.0));
  CHECK(m.macro_f1 == doctest::Approx((0.8 + 0.5 + 2.0 / 3.0) / 3.0));
}

TEST_CASE("macro-F1 averaging modes differ only in which labels count") {
  LabelScheme s("abcd", SchemeLevel::kTop, {"a", "b", "c", "d"});
  std::vector<int> gold = {0, 0, 0, 1};
  std::vector<int> pred = {0, 0, 0, 2};
  // a: 1.0, b: 0 (gold only), c: 0 (pred only), d: absent
  CHECK(ComputeMetrics(gold, pred, s, F1Average::kPresent).macro_f1 ==
        doctest::Approx(1.0 / 3.0));
  CHECK(ComputeMetrics(gold, pred, s, F1Average::kGoldPresent).macro_f1 ==
        doctest::Approx(0.5));
  CHECK(ComputeMetrics(gold, pred, s, F1Average::kAllLabels).macro_f1 ==
        doctest::Approx(0.25));
}

TEST_CASE("all-correct predictions give accuracy and macro-F1 of one") {
  std::vector<int> y = {0, 1, 1, 0};
  Metrics m = ComputeMetrics(y, y, ToyScheme());
  CHECK(m.accuracy == 1.0);
  CHECK(m.macro_f1 == 1.0);
  CHECK_THROWS_AS(ComputeMetrics(std::vector<int>{}, std::vector<int>{}, ToyScheme()),
                  UsageError);
}

TEST_CASE("packing keeps the connective and trims the longer argument") {
  Vocab v;
  Tokens a1 = {"a", "b", "c", "d", "e"}, a2 = {"f", "g"};
  for (const auto& w : a1) v.Add(w);
  for (const auto& w : a2) v.Add(w);
  v.Add("as");
  v.Add("result");
  PackedInput p = Pack(v, a1, a2, std::string("as result"),
                       ConnectiveSlot::kConnective, 8);
  // <s> + 4 arg tokens + 2 connective tokens + </s>
  REQUIRE(p.ids.size() == 8u);
  CHECK(p.ids.front() == Vocab::kBos);
  CHECK(p.ids.back() == Vocab::kEos);
  CHECK(p.connective_position == 3);
  CHECK(p.ids[3] == v.Id("as"));
  CHECK(p.ids[4] == v.Id("result"));
  CHECK(p.ids[1] == v.Id("a"));
  CHECK(p.ids[2] == v.Id("b"));
  CHECK(p.ids[5] == v.Id("f"));

  PackedInput none = Pack(v, a1, a2, std::nullopt, ConnectiveSlot::kConnective, 64);
  PackedInput empty = Pack(v, a1, a2, std::string(""), ConnectiveSlot::kConnective, 64);
  CHECK(none.ids == empty.ids);
  CHECK(none.connective_position == -1);

  PackedInput mask = Pack(v, a1, a2, std::nullopt, ConnectiveSlot::kMask, 64);
  CHECK(mask.ids[mask.connective_position] == Vocab::kMask);
  CHECK_THROWS_AS(Pack(v, a1, a2, std::string("as result"),
                       ConnectiveSlot::kConnective, 5),
                  DataError);
}

TEST_CASE("packing truncation property: connective always survives") {
  Vocab v;
  nn::Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    Tokens a1(1 + rng.Index(20), "x"), a2(1 + rng.Index(20), "y");
    const int max_len = 5 + static_cast<int>(rng.Index(30));
    PackedInput p = Pack(v, a1, a2, std::string("z"), ConnectiveSlot::kConnective,
                         max_len);
    REQUIRE(static_cast<int>(p.ids.size()) <= max_len);
    REQUIRE(p.connective_position >= 2);
    REQUIRE(p.connective_position <= static_cast<int>(p.ids.size()) - 3);
  }
}

TEST_CASE("untrained model refuses inference; empty corpus is rejected") {
  Corpus train(ToyScheme(), ButTask(4, 1, Split::kTrain));
  auto model = EncoderClassifier::ForCorpus(train, TinySpec(), 1);
  CHECK_THROWS_AS(model.Predict(train[0], false), UsageError);
  CHECK_THROWS_AS(model.GetRep(train[0], false), UsageError);
  Corpus empty(ToyScheme(), {});
  CHECK_THROWS_AS(model.Train(empty, nullptr, ToyConfig(), false), ConfigError);
}

TEST_CASE("toy separable task reaches 95% dev accuracy within ten epochs") {
  Corpus train(ToyScheme(), ButTask(200, 11, Split::kTrain));
  Corpus dev(ToyScheme(), ButTask(100, 12, Split::kDev));
  auto model = EncoderClassifier::ForCorpus(train, TinySpec(), 3);
  TrainingLog log = model.Train(train, &dev, ToyConfig(), false);
  CHECK(log.epochs.size() == 10u);
  Metrics m = Evaluate(model, dev, false);
  CHECK(m.accuracy >= 0.95);
  // The kept checkpoint is the best dev epoch.
  double best = 0.0;
  for (const auto& e : log.epochs) best = std::max(best, *e.dev_accuracy);
  CHECK(m.accuracy == doctest::Approx(best));

  // Bag-of-words oracle agreement.
  int agree = 0;
  for (const auto& e : dev.examples()) {
    const bool has_but = std::find(e.arg2.begin(), e.arg2.end(), "but") != e.arg2.end();
    agree += (model.Predict(e, false) == (has_but ? 0 : 1));
  }
  CHECK(agree >= 95);
}

TEST_CASE("one-example corpus: loss strictly decreases and the label is memorized") {
  Corpus one(ToyScheme(), ButTask(1, 2, Split::kTrain));
  auto model = EncoderClassifier::ForCorpus(one, TinySpec(), 4);
  TrainingLog log = model.Train(one, nullptr, ToyConfig(), false);
  for (std::size_t i = 1; i < log.epochs.size(); ++i) {
    CHECK(log.epochs[i].train_loss < log.epochs[i - 1].train_loss);
  }
  CHECK(model.Predict(one[0], false) == one.LabelIndex(one[0]));
}

TEST_CASE("probabilities, representations and determinism") {
  std::vector<DiscourseExample> ex = ButTask(24, 5, Split::kTrain);
  ex[0].connective = "";
  ex[1].connective = "but";
  Corpus train(ToyScheme(), ex);
  TrainConfig cfg = ToyConfig();
  cfg.max_epochs = 2;
  auto a = EncoderClassifier::ForCorpus(train, TinySpec(), 8);
  auto b = EncoderClassifier::ForCorpus(train, TinySpec(), 8);
  auto la = a.Train(train, nullptr, cfg, true);
  auto lb = b.Train(train, nullptr, cfg, true);
  for (std::size_t i = 0; i < la.epochs.size(); ++i) {
    CHECK(la.epochs[i].train_loss == lb.epochs[i].train_loss);
  }
  for (const auto& e : train.examples()) {
    auto p = a.Probabilities(e.arg1, e.arg2, e.connective);
    double sum = 0.0;
    for (double x : p) sum += x;
    CHECK(std::abs(sum - 1.0) <= 1e-6);
    const int argmax = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    CHECK(a.Predict(e.arg1, e.arg2, e.connective) == argmax);
    CHECK(a.GetRep(e, true) == b.GetRep(e, true));
  }
  Eigen::VectorXd v1 = a.GetRep(ex[0].arg1, ex[0].arg2, std::nullopt);
  Eigen::VectorXd v2 = a.GetRep(ex[0].arg1, ex[0].arg2, std::string(""));
  CHECK(v1.size() == a.hidden_dim());
  CHECK(v1 == v2);
  CHECK(v1.dot(v1) / (v1.norm() * v1.norm()) == doctest::Approx(1.0));
}

TEST_CASE("checkpoint round-trip and scheme fingerprint check") {
  Corpus train(ToyScheme(), ButTask(16, 6, Split::kTrain));
  TrainConfig cfg = ToyConfig();
  cfg.max_epochs = 1;
  auto model = EncoderClassifier::ForCorpus(train, TinySpec(), 9);
  model.Train(train, nullptr, cfg, false);
  auto path = std::filesystem::temp_directory_path() / "connshift_clf_test.ckpt";
  model.Save(path);
  auto loaded = EncoderClassifier::Load(path, &ToyScheme());
  for (const auto& e : train.examples()) {
    CHECK(loaded.GetRep(e, false) == model.GetRep(e, false));
  }
  LabelScheme other("toy2", SchemeLevel::kTop, {"contrast", "other"});
  CHECK_THROWS_AS(EncoderClassifier::Load(path, &other), DataError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace connshift::encoder
