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


#include "connshift/harness/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "connshift/error.h"

namespace connshift::harness {

namespace {

struct ModeName {
  Mode mode;
  std::string_view name;
};

constexpr ModeName kModes[] = {
    {Mode::kCommon, "common"},
    {Mode::kE2iEntire, "e2i_entire"},
    {Mode::kE2iReduced, "e2i_reduced"},
    {Mode::kI2iEntire, "i2i_entire"},
    {Mode::kI2iReduced, "i2i_reduced"},
    {Mode::kOurs, "ours"},
    {Mode::kOursNoFilter, "ours_no_filter"},
    {Mode::kOursNoJoint, "ours_no_joint"},
};

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double ParseDouble(std::string_view key, std::string_view v) {
  std::string s(v);
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + s + "'");
  }
  return out;
}

long long ParseInt(std::string_view key, std::string_view v) {
  std::string s(v);
  std::size_t pos = 0;
  long long out;
  try {
    out = std::stoll(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) {
    throw ConfigError("'" + std::string(key) + "' expects an integer, got '" + s + "'");
  }
  return out;
}

std::uint64_t ParseSeed(std::string_view key, std::string_view v) {
  const long long s = ParseInt(key, v);
  if (s < 0) throw ConfigError("seeds must be non-negative");
  return static_cast<std::uint64_t>(s);
}

}  // namespace

std::string_view ToString(Dataset d) {
  switch (d) {
    case Dataset::kPdtb2: return "pdtb2";
    case Dataset::kPdtb3: return "pdtb3";
    case Dataset::kGum: return "gum";
    case Dataset::kTsv: return "tsv";
  }
  return "tsv";
}

Dataset DatasetFromString(std::string_view s) {
  if (s == "pdtb2") return Dataset::kPdtb2;
  if (s == "pdtb3") return Dataset::kPdtb3;
  if (s == "gum") return Dataset::kGum;
  if (s == "tsv") return Dataset::kTsv;
  throw ConfigError("unknown dataset '" + std::string(s) +
                    "' (expected pdtb2, pdtb3, gum or tsv)");
}

std::string_view ToString(Mode m) {
  for (const auto& e : kModes) {
    if (e.mode == m) return e.name;
  }
  return "ours";
}

Mode ModeFromString(std::string_view s) {
  for (const auto& e : kModes) {
    if (e.name == s) return e.mode;
  }
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

std::optional<double> ExperimentConfig::EffectiveFloor() const {
  if (gum_floor_disabled) return std::nullopt;
  if (gum_floor) return gum_floor;
  if (dataset == Dataset::kGum) return 0.6;
  return std::nullopt;
}

int ExperimentConfig::EffectiveShiftEpochs() const {
  return shift_epochs > 0 ? shift_epochs : train_config.max_epochs;
}

void ExperimentConfig::Validate() const {
  train_config.Validate();
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (shift_epochs < 0) throw ConfigError("shift_epochs must be >= 0");
  if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (loss_weight < 0.0) throw ConfigError("loss_weight must be >= 0");
  if (min_frequency < 0) throw ConfigError("min_frequency must be >= 0");
  if (encoder.hidden_dim <= 0 || encoder.num_layers <= 0 || encoder.num_heads <= 0 ||
      encoder.ffn_dim <= 0 || encoder.hidden_dim % encoder.num_heads != 0) {
    throw ConfigError("invalid encoder dimensions");
  }
  if (train_config.max_input_length > encoder.max_positions) {
    throw ConfigError("max_input_length exceeds the encoder's max_positions");
  }
  if (device != "cpu") {
    throw ConfigError("device '" + device + "' is not available; only cpu is supported");
  }
}

nlohmann::json ExperimentConfig::ToJson() const {
  const std::optional<double> floor = EffectiveFloor();
  return {
      {"dataset", ToString(dataset)},
      {"level", corpus::ToString(level)},
      {"mode", ToString(mode)},
      {"seeds", seeds},
      {"train_config",
       {{"lr", train_config.learning_rate},
        {"batch_size", train_config.batch_size},
        {"epochs", train_config.max_epochs},
        {"max_input_length", train_config.max_input_length},
        {"weight_decay", train_config.weight_decay},
        {"max_grad_norm", train_config.max_grad_norm}}},
      {"encoder",
       {{"encoder_id", encoder.encoder_id},
        {"hidden_dim", encoder.hidden_dim},
        {"num_layers", encoder.num_layers},
        {"num_heads", encoder.num_heads},
        {"ffn_dim", encoder.ffn_dim},
        {"max_positions", encoder.max_positions}}},
      {"filter_mode", filtering::ToString(filter_mode)},
      {"gum_floor", floor ? nlohmann::json(*floor) : nlohmann::json(nullptr)},
      {"shift_epochs", EffectiveShiftEpochs()},
      {"shift_seed", shift_seed},
      {"temperature", temperature},
      {"loss_weight", loss_weight},
      {"joint_selection", jointmodel::ToString(joint_selection)},
      {"f1_average", encoder::ToString(average)},
      {"min_frequency", min_frequency},
      {"scheme", scheme},
      {"data_root", data_root.string()},
      {"cache_dir", cache_dir.string()},
      {"filter_report", filter_report.string()},
      {"device", device},
  };
}

void SetConfigValue(ExperimentConfig& c, std::string_view key, std::string_view raw) {
  const std::string v = Trim(raw);
  auto positive_int = [&](int& field) {
    const long long n = ParseInt(key, v);
    if (n <= 0) throw ConfigError("'" + std::string(key) + "' must be positive");
    field = static_cast<int>(n);
  };
  if (key == "dataset") {
    c.dataset = DatasetFromString(v);
  } else if (key == "level") {
    try {
      c.level = corpus::SchemeLevelFromString(v);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "mode") {
    c.mode = ModeFromString(v);
  } else if (key == "seeds") {
    c.seeds.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string s = Trim(item);
      if (!s.empty()) c.seeds.push_back(ParseSeed(key, s));
    }
    if (c.seeds.empty()) throw ConfigError("seeds list is empty");
  } else if (key == "lr") {
    c.train_config.learning_rate = ParseDouble(key, v);
  } else if (key == "batch_size") {
    positive_int(c.train_config.batch_size);
  } else if (key == "epochs") {
    positive_int(c.train_config.max_epochs);
  } else if (key == "max_input_length") {
    positive_int(c.train_config.max_input_length);
  } else if (key == "weight_decay") {
    c.train_config.weight_decay = ParseDouble(key, v);
  } else if (key == "max_grad_norm") {
    c.train_config.max_grad_norm = ParseDouble(key, v);
  } else if (key == "encoder_id") {
    c.encoder.encoder_id = v;
  } else if (key == "hidden_dim") {
    positive_int(c.encoder.hidden_dim);
  } else if (key == "num_layers") {
    positive_int(c.encoder.num_layers);
  } else if (key == "num_heads") {
    positive_int(c.encoder.num_heads);
  } else if (key == "ffn_dim") {
    positive_int(c.encoder.ffn_dim);
  } else if (key == "filter_mode") {
    c.filter_mode = filtering::ThresholdModeFromString(v);
  } else if (key == "gum_floor") {
    if (v == "none") {
      c.gum_floor.reset();
      c.gum_floor_disabled = true;
    } else {
      c.gum_floor = ParseDouble(key, v);
      c.gum_floor_disabled = false;
    }
  } else if (key == "shift_epochs") {
    const long long n = ParseInt(key, v);
    if (n < 0) throw ConfigError("shift_epochs must be >= 0");
    c.shift_epochs = static_cast<int>(n);
  } else if (key == "shift_seed") {
    c.shift_seed = ParseSeed(key, v);
  } else if (key == "temperature") {
    c.temperature = ParseDouble(key, v);
  } else if (key == "loss_weight") {
    c.loss_weight = ParseDouble(key, v);
  } else if (key == "joint_selection") {
    c.joint_selection = jointmodel::DevSelectionFromString(v);
  } else if (key == "f1_average") {
    try {
      c.average = encoder::F1AverageFromString(v);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "min_frequency") {
    c.min_frequency = static_cast<int>(ParseInt(key, v));
  } else if (key == "scheme") {
    c.scheme = v;
  } else if (key == "data_root") {
    c.data_root = v;
  } else if (key == "cache_dir") {
    c.cache_dir = v;
  } else if (key == "filter_report") {
    c.filter_report = v;
  } else if (key == "device") {
    c.device = v;
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

ExperimentConfig ParseConfig(std::string_view text, ExperimentConfig base) {
  std::stringstream ss{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = Trim(std::string_view(trimmed).substr(0, eq));
    try {
      SetConfigValue(base, key, std::string_view(trimmed).substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return ParseConfig(buf.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void ApplyEnvironment(ExperimentConfig& config) {
  if (config.data_root.empty()) {
    if (const char* v = std::getenv(kEnvDataRoot); v && *v) config.data_root = v;
  }
  if (config.cache_dir.empty()) {
    if (const char* v = std::getenv(kEnvCacheDir); v && *v) config.cache_dir = v;
  }
  if (config.device == "cpu") {
    if (const char* v = std::getenv(kEnvDevice); v && *v) config.device = v;
  }
}

}  // namespace connshift::harness
