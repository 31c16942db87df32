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


// Per-relation threshold filtering of explicit training examples by shift
// score.

#ifndef CONNSHIFT_FILTERING_FILTER_H_
#define CONNSHIFT_FILTERING_FILTER_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "connshift/corpus/types.h"

namespace connshift::filtering {

struct ScoredExample {
  std::string id;
  std::string relation;
  double score = 0.0;
};

enum class ThresholdMode { kRelationAverage, kGlobalAverage };

std::string_view ToString(ThresholdMode m);
ThresholdMode ThresholdModeFromString(std::string_view s);  // ConfigError

// Mean score of each relation group.
std::map<std::string, double> PerRelationThresholds(
    std::span<const ScoredExample> examples);

// Every present relation mapped to the mean over all examples.
std::map<std::string, double> GlobalThresholds(
    std::span<const ScoredExample> examples);

// Indices (ascending) of examples to keep: an example is dropped iff its
// score is below its relation threshold and, when a floor is given, also
// below the floor. Throws ConfigError if a present relation has no
// threshold.
std::vector<std::size_t> FilterCorpus(
    std::span<const ScoredExample> examples,
    const std::map<std::string, double>& thresholds,
    std::optional<double> floor = std::nullopt);

struct FilterReport {
  ThresholdMode mode = ThresholdMode::kRelationAverage;
  std::optional<double> floor;
  std::map<std::string, double> thresholds;
  std::map<std::string, int> kept_by_relation;
  std::map<std::string, int> dropped_by_relation;
  std::vector<std::string> dropped_ids;
  std::size_t kept = 0;
  std::size_t dropped = 0;

  nlohmann::json ToJson() const;
  static FilterReport FromJson(const nlohmann::json& j);
};

struct FilterOutcome {
  corpus::Corpus kept;
  FilterReport report;
};

// Filters `corpus` with per-example `scores` (aligned with its examples).
FilterOutcome FilterExamples(const corpus::Corpus& corpus,
                             std::span<const double> scores,
                             ThresholdMode mode = ThresholdMode::kRelationAverage,
                             std::optional<double> floor = std::nullopt);

}  // namespace connshift::filtering

#endif  // CONNSHIFT_FILTERING_FILTER_H_
