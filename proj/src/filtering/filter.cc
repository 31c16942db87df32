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


#include "connshift/filtering/filter.h"

#include "connshift/error.h"

namespace connshift::filtering {

std::string_view ToString(ThresholdMode m) {
  return m == ThresholdMode::kRelationAverage ? "relation_avg" : "global_avg";
}

ThresholdMode ThresholdModeFromString(std::string_view s) {
  if (s == "relation_avg") return ThresholdMode::kRelationAverage;
  if (s == "global_avg") return ThresholdMode::kGlobalAverage;
  throw ConfigError("unknown filter mode '" + std::string(s) +
                    "' (expected relation_avg or global_avg)");
}

std::map<std::string, double> PerRelationThresholds(
    std::span<const ScoredExample> examples) {
  std::map<std::string, std::pair<double, long>> sums;
  for (const auto& e : examples) {
    auto& [sum, n] = sums[e.relation];
    sum += e.score;
    ++n;
  }
  std::map<std::string, double> out;
  for (const auto& [rel, s] : sums) out[rel] = s.first / s.second;
  return out;
}

std::map<std::string, double> GlobalThresholds(
    std::span<const ScoredExample> examples) {
  std::map<std::string, double> out;
  if (examples.empty()) return out;
  double sum = 0.0;
  for (const auto& e : examples) sum += e.score;
  const double mean = sum / static_cast<double>(examples.size());
  for (const auto& e : examples) out[e.relation] = mean;
  return out;
}

std::vector<std::size_t> FilterCorpus(
    std::span<const ScoredExample> examples,
    const std::map<std::string, double>& thresholds,
    std::optional<double> floor) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& e = examples[i];
    auto it = thresholds.find(e.relation);
    if (it == thresholds.end()) {
      throw ConfigError("no threshold for relation '" + e.relation + "'");
    }
    const bool below_mean = e.score < it->second;
    const bool below_floor = !floor || e.score < *floor;
    if (!(below_mean && below_floor)) kept.push_back(i);
  }
  return kept;
}

nlohmann::json FilterReport::ToJson() const {
  nlohmann::json j = {{"mode", std::string(ToString(mode))},
                      {"thresholds", thresholds},
                      {"kept_by_relation", kept_by_relation},
                      {"dropped_by_relation", dropped_by_relation},
                      {"kept", kept},
                      {"dropped", dropped},
                      {"dropped_ids", dropped_ids}};
  j["floor"] = floor ? nlohmann::json(*floor) : nlohmann::json(nullptr);
  return j;
}

FilterReport FilterReport::FromJson(const nlohmann::json& j) {
  try {
    FilterReport r;
    r.mode = ThresholdModeFromString(j.at("mode").get<std::string>());
    if (!j.at("floor").is_null()) r.floor = j.at("floor").get<double>();
    r.thresholds = j.at("thresholds").get<std::map<std::string, double>>();
    r.kept_by_relation = j.at("kept_by_relation").get<std::map<std::string, int>>();
    r.dropped_by_relation =
        j.at("dropped_by_relation").get<std::map<std::string, int>>();
    r.dropped_ids = j.at("dropped_ids").get<std::vector<std::string>>();
    r.kept = j.at("kept").get<std::size_t>();
    r.dropped = j.at("dropped").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed filter report: " + std::string(e.what()));
  }
}

FilterOutcome FilterExamples(const corpus::Corpus& corpus,
                             std::span<const double> scores,
                             ThresholdMode mode, std::optional<double> floor) {
  if (scores.size() != corpus.size()) {
    throw UsageError("scores are not aligned with the corpus");
  }
  std::vector<ScoredExample> scored;
  scored.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    scored.push_back({corpus[i].id, corpus.LabelOf(corpus[i]), scores[i]});
  }
  FilterReport report;
  report.mode = mode;
  report.floor = floor;
  report.thresholds = mode == ThresholdMode::kRelationAverage
                          ? PerRelationThresholds(scored)
                          : GlobalThresholds(scored);
  std::vector<std::size_t> kept = FilterCorpus(scored, report.thresholds, floor);
  std::size_t next = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (next < kept.size() && kept[next] == i) {
      ++report.kept_by_relation[scored[i].relation];
      ++next;
    } else {
      ++report.dropped_by_relation[scored[i].relation];
      report.dropped_ids.push_back(scored[i].id);
    }
  }
  report.kept = kept.size();
  report.dropped = scored.size() - kept.size();
  return {corpus.Select(kept), std::move(report)};
}

}  // namespace connshift::filtering
