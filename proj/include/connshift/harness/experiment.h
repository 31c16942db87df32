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

// Experiment modes run over several seeds and aggregated.

#ifndef CONNSHIFT_HARNESS_EXPERIMENT_H_
#define CONNSHIFT_HARNESS_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "connshift/corpus/types.h"
#include "connshift/filtering/filter.h"
#include "connshift/harness/config.h"

namespace connshift::harness {

struct ExperimentData {
  corpus::Corpus explicit_corpus;
  corpus::Corpus implicit_corpus;
};

// Reads the configured dataset from data_root:
//   pdtb2 / pdtb3  section directories (see corpus::LoadPdtb)
//   gum            *.rels files, split by leading connective and
//                  frequency-filtered
//   tsv            train.tsv / dev.tsv / test.tsv in canonical format,
//                  partitioned by the modality column
ExperimentData LoadExperimentData(const ExperimentConfig& config);

// Order-sensitive hash of ids, tokens, connectives and labels.
std::uint64_t CorpusFingerprint(const corpus::Corpus& corpus);

struct SeedResult {
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::size_t train_size = 0;
  int selected_epoch = 0;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for one value
};

Summary Summarize(std::span<const double> values);

struct RunReport {
  std::string mode;
  std::vector<SeedResult> per_seed;
  Summary accuracy;
  Summary macro_f1;
  nlohmann::json config;
  std::string explicit_fingerprint;
  std::string implicit_fingerprint;
  std::optional<filtering::FilterReport> filter;
  std::vector<std::string> notes;

  nlohmann::json ToJson() const;
  static RunReport FromJson(const nlohmann::json& j);
};

// Predicts the most frequent label of `train` for every example of `test`.
// Ties go to the label that comes first in the scheme and are noted.
RunReport RunCommon(const corpus::Corpus& train, const corpus::Corpus& test,
                    encoder::F1Average average = encoder::F1Average::kGoldPresent);

// Runs config.mode on already loaded data. Every mode evaluates on the
// implicit test split and selects epochs on the implicit dev split.
RunReport RunExperiment(const ExperimentConfig& config, const ExperimentData& data);
RunReport RunExperiment(const ExperimentConfig& config);

// Shift scores on explicit train and the filtered corpus, as used by the
// `ours` and `ours_no_joint` modes.
struct FilterStage {
  std::vector<double> scores;
  double shift_rate = 0.0;
  filtering::FilterOutcome outcome;
};
FilterStage RunFilterStage(const ExperimentConfig& config,
                           const corpus::Corpus& explicit_train);

// Recomputes mean and sample std from the per-seed values.
void Aggregate(RunReport& report);

// One row per report: mode, n, accuracy mean/std, macro-F1 mean/std.
nlohmann::json SummaryTable(std::span<const RunReport> reports);
std::string FormatSummaryTable(std::span<const RunReport> reports);

}  // namespace connshift::harness

#endif  // CONNSHIFT_HARNESS_EXPERIMENT_H_
