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

#include <cmath>
#include <filesystem>

#include "connshift/error.h"
#include "connshift/harness/synthetic.h"
#include "connshift/shiftmetric/shift.h"

namespace connshift::shiftmetric {
namespace {

harness::SyntheticCorpus SmallSynthetic() {
  harness::SyntheticOptions o = harness::SyntheticOptions::Default();
  o.explicit_train = 60;
  o.explicit_dev = o.explicit_test = 10;
  o.implicit_train = o.implicit_dev = o.implicit_test = 10;
  return harness::GenerateSynthetic(o);
}

encoder::EncoderClassifier BrieflyTrained(const corpus::Corpus& c, std::uint64_t seed) {
  encoder::EncoderSpec spec;
  spec.hidden_dim = 16;
  spec.num_layers = 1;
  spec.num_heads = 2;
  spec.ffn_dim = 32;
  spec.max_positions = 64;
  encoder::TrainConfig cfg;
  cfg.max_epochs = 1;
  cfg.max_input_length = 64;
  cfg.seed = seed;
  auto model = encoder::EncoderClassifier::ForCorpus(c, spec, seed);
  model.Train(c, nullptr, cfg, true);
  return model;
}

TEST_CASE("cosine against a hand computation") {
  Eigen::VectorXd a(3), b(3);
  a << 1, 2, 2;
  b << 2, 0, 1;
  CHECK(Cosine(a, b) == doctest::Approx(4.0 / (3.0 * std::sqrt(5.0))));
  CHECK(Cosine(a, a) == doctest::Approx(1.0));
  CHECK(Cosine(a, -a) == doctest::Approx(-1.0));
  CHECK(Cosine(a, 5.0 * b) == doctest::Approx(Cosine(a, b)));
}

TEST_CASE("rates") {
  ShiftResult r;
  r.n = 8;
  r.diff_num = 2;
  CHECK(ShiftRate(r) == 0.25);
  const std::vector<double> s = {0.1, 0.5, 0.9, -0.2};
  CHECK(FractionBelow(s) == 0.5);
  CHECK(FractionBelow(s, 0.0) == 0.25);
}

TEST_CASE("ScoreShift invariants") {
  const auto syn = SmallSynthetic();
  const corpus::Corpus c = syn.ExplicitCorpus().Subset(corpus::Split::kTrain);
  const auto model = BrieflyTrained(c, 1);
  const ShiftResult r = ScoreShift(model, c);
  REQUIRE(r.n == c.size());
  REQUIRE(r.scores.size() == c.size());
  int diff = 0;
  for (std::size_t i = 0; i < r.n; ++i) {
    CHECK(r.scores[i] >= -1.0);
    CHECK(r.scores[i] <= 1.0);
    CHECK(r.ids[i] == c[i].id);
    diff += r.pred_without[i] != r.pred_with[i];
  }
  CHECK(diff == r.diff_num);
  // Scoring is a pure function of the model.
  CHECK(ScoreShift(model, c).scores == r.scores);

  const auto breakdown = BreakdownByRelation(c, r);
  std::size_t total = 0;
  for (const auto& [label, b] : breakdown) total += b.n;
  CHECK(total == c.size());
}

TEST_CASE("score files round-trip") {
  const auto syn = SmallSynthetic();
  const corpus::Corpus c = syn.ExplicitCorpus().Subset(corpus::Split::kTrain);
  const auto model = BrieflyTrained(c, 2);
  const ShiftResult r = ScoreShift(model, c);
  const auto path = std::filesystem::temp_directory_path() / "connshift_scores.tsv";
  WriteScoreFile(path, c, r);
  const auto back = ReadScoreFile(path);
  REQUIRE(back.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(back.at(c[i].id) == r.scores[i]);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace connshift::shiftmetric
