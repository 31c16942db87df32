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
#include "connshift/harness/config.h"
#include "connshift/harness/experiment.h"
#include "connshift/harness/synthetic.h"

namespace connshift::harness {
namespace {

corpus::DiscourseExample Ex(std::string id, std::string label, corpus::Split split) {
  corpus::DiscourseExample e;
  e.id = std::move(id);
  e.arg1 = {"a"};
  e.arg2 = {"b"};
  e.relation_top = std::move(label);
  e.split = split;
  return e;
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = ParseConfig(
      "# comment\n"
      "dataset = gum\n"
      "mode = e2i_reduced\n"
      "seeds = 1, 2,3\n"
      "lr = 2e-5\n"
      "epochs = 4\n"
      "gum_floor = none\n"
      "temperature = 0.5\n");
  CHECK(c.dataset == Dataset::kGum);
  CHECK(c.mode == Mode::kE2iReduced);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(c.train_config.learning_rate == 2e-5);
  CHECK(c.train_config.max_epochs == 4);
  CHECK(!c.EffectiveFloor().has_value());
  CHECK(c.temperature == 0.5);
  CHECK(c.EffectiveShiftEpochs() == 4);
}

TEST_CASE("config defaults") {
  ExperimentConfig c;
  CHECK(c.seeds.size() == 5);
  CHECK(c.train_config.learning_rate == 1e-5);
  CHECK(c.loss_weight == 0.5);
  CHECK(c.temperature == 1.0);
  CHECK(!c.EffectiveFloor().has_value());
  c.dataset = Dataset::kGum;
  CHECK(c.EffectiveFloor() == 0.6);
}

TEST_CASE("config errors name the line") {
  try {
    ParseConfig("dataset = pdtb2\nbogus_key = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  CHECK_THROWS_AS(ParseConfig("mode = best\n"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("lr = fast\n"), ConfigError);
  CHECK_THROWS_AS(ParseConfig("no equals sign\n"), ConfigError);
  ExperimentConfig c;
  c.device = "cuda";
  CHECK_THROWS_AS(c.Validate(), ConfigError);
}

TEST_CASE("mode names round-trip") {
  for (Mode m : {Mode::kCommon, Mode::kE2iEntire, Mode::kE2iReduced, Mode::kI2iEntire,
                 Mode::kI2iReduced, Mode::kOurs, Mode::kOursNoFilter, Mode::kOursNoJoint}) {
    CHECK(ModeFromString(ToString(m)) == m);
  }
}

TEST_CASE("aggregation uses the sample standard deviation") {
  const std::vector<double> v = {40.0, 42.0};
  const Summary s = Summarize(v);
  CHECK(s.mean == 41.0);
  CHECK(s.std == doctest::Approx(std::sqrt(2.0)));
  CHECK(Summarize(std::vector<double>{7.0}).std == 0.0);
}

TEST_CASE("common baseline predicts the modal training label") {
  corpus::LabelScheme scheme("t", corpus::SchemeLevel::kTop, {"p", "q", "r"});
  const corpus::Corpus train(scheme, {Ex("1", "q", corpus::Split::kTrain),
                                      Ex("2", "q", corpus::Split::kTrain),
                                      Ex("3", "r", corpus::Split::kTrain)});
  const corpus::Corpus test(scheme, {Ex("4", "q", corpus::Split::kTest),
                                     Ex("5", "p", corpus::Split::kTest),
                                     Ex("6", "q", corpus::Split::kTest),
                                     Ex("7", "r", corpus::Split::kTest)});
  const RunReport r = RunCommon(train, test);
  CHECK(r.accuracy.mean == 0.5);
  // Per-label F1 over gold labels: q = 2*0.5*1/(1.5) = 2/3, p = r = 0.
  CHECK(r.macro_f1.mean == doctest::Approx((2.0 / 3.0) / 3.0));

  const corpus::Corpus tied(scheme, {Ex("1", "r", corpus::Split::kTrain),
                                     Ex("2", "q", corpus::Split::kTrain)});
  const RunReport t = RunCommon(tied, test);
  CHECK(t.accuracy.mean == 0.5);
  bool noted = false;
  for (const auto& n : t.notes) noted = noted || n.find("tie") != std::string::npos;
  CHECK(noted);
}

SyntheticCorpus Tiny() {
  SyntheticOptions o = SyntheticOptions::Default();
  o.explicit_train = 60;
  o.explicit_dev = o.explicit_test = 10;
  o.implicit_train = 60;
  o.implicit_dev = 20;
  o.implicit_test = 20;
  return GenerateSynthetic(o);
}

ExperimentConfig TinyConfig() {
  ExperimentConfig c;
  c.seeds = {1};
  c.train_config.max_epochs = 1;
  c.train_config.learning_rate = 1e-3;
  c.encoder.hidden_dim = 16;
  c.encoder.num_layers = 1;
  c.encoder.num_heads = 2;
  c.encoder.ffn_dim = 32;
  return c;
}

TEST_CASE("reduced modes need a recorded filter size") {
  const auto syn = Tiny();
  const ExperimentData data{syn.ExplicitCorpus(), syn.ImplicitCorpus()};
  ExperimentConfig c = TinyConfig();
  c.mode = Mode::kE2iReduced;
  CHECK_THROWS_AS(RunExperiment(c, data), ConfigError);

  const auto cache = std::filesystem::temp_directory_path() / "connshift_harness_cache";
  std::filesystem::remove_all(cache);
  c.cache_dir = cache;
  c.mode = Mode::kOurs;
  const RunReport ours = RunExperiment(c, data);
  REQUIRE(ours.filter.has_value());
  c.mode = Mode::kI2iReduced;
  const RunReport reduced = RunExperiment(c, data);
  CHECK(reduced.per_seed.at(0).train_size == ours.filter->kept);
  CHECK(ours.per_seed.at(0).train_size == ours.filter->kept);
  std::filesystem::remove_all(cache);
}

TEST_CASE("run reports round-trip through JSON") {
  RunReport r;
  r.mode = "ours";
  r.per_seed = {{13, 0.5, 0.25, 100, 3}, {21, 0.7, 0.35, 100, 2}};
  Aggregate(r);
  r.notes = {"n"};
  const RunReport back = RunReport::FromJson(r.ToJson());
  CHECK(back.mode == r.mode);
  CHECK(back.per_seed.size() == 2);
  CHECK(back.per_seed[1].selected_epoch == 2);
  CHECK(back.macro_f1.mean == doctest::Approx(0.3));
  const std::vector<RunReport> all = {r};
  CHECK(FormatSummaryTable(all).find("ours") != std::string::npos);
}

}  // namespace
}  // namespace connshift::harness
