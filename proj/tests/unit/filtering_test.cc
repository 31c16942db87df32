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

#include <algorithm>
#include <map>
#include <numeric>

#include "connshift/error.h"
#include "connshift/filtering/filter.h"
#include "connshift/nn/rng.h"

namespace connshift::filtering {
namespace {

// Brute-force oracle: example i survives iff no strictly larger fraction of
// its group's total falls short, i.e. n * score >= sum over the group.
std::vector<std::size_t> OracleKeep(const std::vector<ScoredExample>& ex,
                                    std::optional<double> floor) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    long double sum = 0;
    int n = 0;
    for (const auto& o : ex) {
      if (o.relation == ex[i].relation) {
        sum += o.score;
        ++n;
      }
    }
    const bool above = static_cast<long double>(ex[i].score) * n >= sum - 1e-12L;
    if (above || (floor && ex[i].score >= *floor)) keep.push_back(i);
  }
  return keep;
}

std::vector<ScoredExample> RandomScores(nn::Rng& rng, int n) {
  static const char* kRel[] = {"a", "b", "c"};
  std::vector<ScoredExample> ex;
  for (int i = 0; i < n; ++i) {
    // Coarse grid so ties with the mean occur.
    ex.push_back({"e" + std::to_string(i), kRel[rng.Index(3)],
                  static_cast<double>(rng.Index(5)) / 4.0});
  }
  return ex;
}

TEST_CASE("per-relation thresholds are group means") {
  const std::vector<ScoredExample> ex = {{"1", "a", 0.2}, {"2", "a", 0.6}, {"3", "b", -0.5}};
  const auto th = PerRelationThresholds(ex);
  CHECK(th.at("a") == doctest::Approx(0.4));
  CHECK(th.at("b") == doctest::Approx(-0.5));
  const auto g = GlobalThresholds(ex);
  CHECK(g.at("a") == doctest::Approx(0.1));
  CHECK(g.at("b") == doctest::Approx(0.1));
}

TEST_CASE("an example exactly at the mean is kept") {
  const std::vector<ScoredExample> ex = {{"1", "a", 0.25}, {"2", "a", 0.5}, {"3", "a", 0.75}};
  CHECK(FilterCorpus(ex, PerRelationThresholds(ex)) == std::vector<std::size_t>{1, 2});
}

TEST_CASE("filtering matches the brute-force oracle") {
  nn::Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ex = RandomScores(rng, 1 + static_cast<int>(rng.Index(30)));
    const std::optional<double> floor =
        trial % 2 ? std::optional<double>(0.6) : std::nullopt;
    CHECK(FilterCorpus(ex, PerRelationThresholds(ex), floor) == OracleKeep(ex, floor));
  }
}

TEST_CASE("properties: every group keeps its maximum and the floor only adds") {
  nn::Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ex = RandomScores(rng, 2 + static_cast<int>(rng.Index(40)));
    const auto th = PerRelationThresholds(ex);
    const auto kept = FilterCorpus(ex, th);
    const auto floored = FilterCorpus(ex, th, 0.6);
    CHECK(std::includes(floored.begin(), floored.end(), kept.begin(), kept.end()));
    std::map<std::string, double> best;
    for (const auto& e : ex) best[e.relation] = std::max(best.count(e.relation) ? best[e.relation] : -2.0, e.score);
    for (const auto& [rel, score] : best) {
      bool found = false;
      for (auto i : kept) found = found || (ex[i].relation == rel && ex[i].score == score);
      CHECK(found);
    }
    for (auto i : kept) CHECK(ex[i].score >= th.at(ex[i].relation) - 1e-12);
  }
}

TEST_CASE("FilterExamples builds a consistent report") {
  corpus::LabelScheme scheme("t", corpus::SchemeLevel::kTop, {"x", "y"});
  std::vector<corpus::DiscourseExample> ex;
  const char* labels[] = {"x", "x", "y", "y", "y"};
  for (int i = 0; i < 5; ++i) {
    corpus::DiscourseExample e;
    e.id = "d" + std::to_string(i);
    e.arg1 = {"a"};
    e.arg2 = {"b"};
    e.relation_top = labels[i];
    ex.push_back(e);
  }
  const corpus::Corpus c(scheme, ex);
  const std::vector<double> scores = {0.9, 0.1, 0.3, 0.6, 0.9};
  const FilterOutcome out = FilterExamples(c, scores);
  CHECK(out.kept.size() == 3);
  CHECK(out.report.kept == 3);
  CHECK(out.report.dropped == 2);
  CHECK(out.report.dropped_ids == std::vector<std::string>{"d1", "d2"});
  CHECK(out.report.kept_by_relation.at("y") == 2);
  const FilterReport back = FilterReport::FromJson(out.report.ToJson());
  CHECK(back.dropped_ids == out.report.dropped_ids);
  CHECK(back.thresholds == out.report.thresholds);
  CHECK_THROWS_AS(FilterExamples(c, std::vector<double>{0.1}), Error);
}

TEST_CASE("threshold mode names round-trip") {
  for (auto m : {ThresholdMode::kRelationAverage, ThresholdMode::kGlobalAverage}) {
    CHECK(ThresholdModeFromString(ToString(m)) == m);
  }
  CHECK_THROWS_AS(ThresholdModeFromString("median"), ConfigError);
}

}  // namespace
}  // namespace connshift::filtering
