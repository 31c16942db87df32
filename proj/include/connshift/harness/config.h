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


// Experiment configuration: declarative key = value files, environment
// overrides and JSON snapshots.

#ifndef CONNSHIFT_HARNESS_CONFIG_H_
#define CONNSHIFT_HARNESS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "connshift/corpus/types.h"
#include "connshift/encoder/classifier.h"
#include "connshift/encoder/metrics.h"
#include "connshift/encoder/transformer.h"
#include "connshift/filtering/filter.h"
#include "connshift/jointmodel/joint_model.h"

namespace connshift::harness {

enum class Dataset { kPdtb2, kPdtb3, kGum, kTsv };
enum class Mode {
  kCommon,
  kE2iEntire,
  kE2iReduced,
  kI2iEntire,
  kI2iReduced,
  kOurs,
  kOursNoFilter,
  kOursNoJoint,
};

std::string_view ToString(Dataset d);
std::string_view ToString(Mode m);
Dataset DatasetFromString(std::string_view s);  // ConfigError
Mode ModeFromString(std::string_view s);        // ConfigError

inline constexpr std::uint64_t kDefaultSeeds[] = {13, 21, 42, 87, 100};

// Environment variables read by ApplyEnvironment.
inline constexpr const char* kEnvDataRoot = "CONNSHIFT_DATA_ROOT";
inline constexpr const char* kEnvCacheDir = "CONNSHIFT_CACHE_DIR";
inline constexpr const char* kEnvDevice = "CONNSHIFT_DEVICE";

struct ExperimentConfig {
  Dataset dataset = Dataset::kTsv;
  corpus::SchemeLevel level = corpus::SchemeLevel::kTop;
  Mode mode = Mode::kOurs;
  std::vector<std::uint64_t> seeds{std::begin(kDefaultSeeds), std::end(kDefaultSeeds)};
  encoder::TrainConfig train_config;
  encoder::EncoderSpec encoder;
  filtering::ThresholdMode filter_mode = filtering::ThresholdMode::kRelationAverage;
  // Defaults to 0.6 for GUM when unset; "none" in a config file disables it.
  std::optional<double> gum_floor;
  bool gum_floor_disabled = false;
  // Epochs of the classifier that produces shift scores (0 = train epochs).
  int shift_epochs = 0;
  // Seed of that classifier; filtering happens once per run.
  std::uint64_t shift_seed = 13;
  double temperature = 1.0;
  double loss_weight = 0.5;
  jointmodel::DevSelection joint_selection = jointmodel::DevSelection::kImplicitDev;
  encoder::F1Average average = encoder::F1Average::kGoldPresent;
  // GUM label frequency threshold.
  int min_frequency = 100;
  // Named label scheme for tsv data; empty = observed labels, sorted.
  std::string scheme;
  std::filesystem::path data_root;
  std::filesystem::path cache_dir;
  // Filter report whose kept size the *_reduced modes match.
  std::filesystem::path filter_report;
  std::string device = "cpu";

  // Floor in effect (gum_floor, or 0.6 for GUM unless disabled).
  std::optional<double> EffectiveFloor() const;
  int EffectiveShiftEpochs() const;
  // Throws ConfigError on inconsistent settings.
  void Validate() const;
  nlohmann::json ToJson() const;
};

// Sets one field from its config-file key; throws ConfigError for unknown
// keys or unparsable values. Keys: dataset, level, mode, seeds, lr,
// batch_size, epochs, max_input_length, weight_decay, max_grad_norm,
// encoder_id, hidden_dim, num_layers, num_heads, ffn_dim, filter_mode,
// gum_floor, shift_epochs, shift_seed, temperature, loss_weight,
// joint_selection, f1_average, min_frequency, scheme, data_root,
// cache_dir, filter_report, device.
void SetConfigValue(ExperimentConfig& config, std::string_view key,
                    std::string_view value);

// "key = value" lines; '#' starts a comment.
ExperimentConfig ParseConfig(std::string_view text,
                             ExperimentConfig base = ExperimentConfig{});
ExperimentConfig LoadConfig(const std::filesystem::path& path,
                            ExperimentConfig base = ExperimentConfig{});

// Fills data_root, cache_dir and device from the environment when they
// are still at their defaults.
void ApplyEnvironment(ExperimentConfig& config);

}  // namespace connshift::harness

#endif  // CONNSHIFT_HARNESS_CONFIG_H_
