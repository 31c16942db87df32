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


#include "connshift/harness/experiment.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "connshift/corpus/inventory.h"
#include "connshift/corpus/io.h"
#include "connshift/corpus/transforms.h"
#include "connshift/error.h"
#include "connshift/hash.h"
#include "connshift/log.h"
#include "connshift/nn/rng.h"
#include "connshift/shiftmetric/shift.h"

namespace connshift::harness {

namespace fs = std::filesystem;
using corpus::Corpus;
using corpus::Split;

namespace {

corpus::LabelScheme ObservedScheme(const std::vector<corpus::DiscourseExample>& ex,
                                   corpus::SchemeLevel level) {
  std::set<std::string> labels;
  std::map<std::string, std::string> parents;
  for (const auto& e : ex) {
    if (level == corpus::SchemeLevel::kTop) {
      labels.insert(e.relation_top);
    } else if (e.relation_second) {
      labels.insert(*e.relation_second);
      parents[*e.relation_second] = e.relation_top;
    }
  }
  if (labels.empty()) throw DataError("no labels found at the requested level");
  return corpus::LabelScheme("observed", level, {labels.begin(), labels.end()},
                             level == corpus::SchemeLevel::kSecond
                                 ? parents
                                 : std::map<std::string, std::string>{});
}

ExperimentData LoadTsvData(const ExperimentConfig& config) {
  std::vector<corpus::RowError> errors;
  std::vector<corpus::DiscourseExample> all = corpus::ReadCorpusDir(config.data_root, &errors);
  if (!errors.empty()) {
    LogWarning(std::to_string(errors.size()) + " malformed rows skipped in " +
               config.data_root.string());
  }
  corpus::LabelScheme scheme = config.scheme.empty()
                                   ? ObservedScheme(all, config.level)
                                   : corpus::LabelScheme::Named(config.scheme);
  std::vector<corpus::DiscourseExample> ex, im;
  for (auto& e : all) {
    if (config.level == corpus::SchemeLevel::kSecond && !e.relation_second) continue;
    const std::string& label =
        config.level == corpus::SchemeLevel::kTop ? e.relation_top : *e.relation_second;
    if (!scheme.IndexOf(label)) continue;
    (e.modality == corpus::Modality::kExplicit ? ex : im).push_back(std::move(e));
  }
  return {Corpus(scheme, std::move(ex)), Corpus(scheme, std::move(im))};
}

ExperimentData LoadGumData(const ExperimentConfig& config) {
  if (!fs::is_directory(config.data_root)) {
    throw IoError("GUM directory not found: " + config.data_root.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(config.data_root)) {
    if (entry.path().extension() == ".rels") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no .rels files in " + config.data_root.string());
  std::vector<corpus::DiscourseExample> rows;
  for (const auto& f : files) {
    corpus::RelsLoadResult r = corpus::LoadRels(f);
    if (!r.errors.empty()) {
      LogWarning(std::to_string(r.errors.size()) + " malformed rows skipped in " +
                 f.string());
    }
    for (auto& e : r.examples) rows.push_back(std::move(e));
  }
  corpus::ModalitySplit split =
      corpus::SplitByLeadingConnective(rows, corpus::ConnectiveInventory::Default());
  split = corpus::FilterMinFrequency(split, config.min_frequency);
  return {split.explicit_corpus, split.implicit_corpus};
}

std::vector<std::size_t> UniformSample(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  nn::Rng rng(seed);
  rng.Shuffle(idx);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

fs::path CachedFilterReport(const ExperimentConfig& config, const Corpus& explicit_train) {
  if (config.cache_dir.empty()) return {};
  const std::optional<double> floor = config.EffectiveFloor();
  Fnv1a64 h;
  h.Field(HexDigest(CorpusFingerprint(explicit_train)))
      .Field(filtering::ToString(config.filter_mode))
      .Field(floor ? std::to_string(*floor) : "none")
      .Field(std::to_string(config.shift_seed))
      .Field(std::to_string(config.EffectiveShiftEpochs()))
      .Field(config.ToJson()["encoder"].dump())
      .Field(config.ToJson()["train_config"].dump());
  return config.cache_dir / ("filter-" + HexDigest(h.digest()) + ".json");
}

std::size_t RecordedFilteredSize(const ExperimentConfig& config,
                                 const Corpus& explicit_train,
                                 std::vector<std::string>& notes) {
  fs::path path = config.filter_report;
  if (path.empty()) path = CachedFilterReport(config, explicit_train);
  if (path.empty() || !fs::exists(path)) {
    throw ConfigError(std::string(ToString(config.mode)) +
                      " needs a prior filter run: set filter_report or run `ours` "
                      "with the same cache_dir first");
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot open filter report " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  const filtering::FilterReport report = filtering::FilterReport::FromJson(j);
  notes.push_back("reduced size " + std::to_string(report.kept) + " from " + path.string());
  return report.kept;
}

}  // namespace

ExperimentData LoadExperimentData(const ExperimentConfig& config) {
  if (config.data_root.empty()) {
    throw ConfigError(std::string("data_root is not set (config key or ") + kEnvDataRoot +
                      ")");
  }
  switch (config.dataset) {
    case Dataset::kPdtb2:
    case Dataset::kPdtb3: {
      corpus::PdtbLoadResult r = corpus::LoadPdtb(
          config.data_root,
          config.dataset == Dataset::kPdtb2 ? corpus::PdtbVersion::kV2 : corpus::PdtbVersion::kV3,
          config.level);
      if (!r.errors.empty()) {
        LogWarning(std::to_string(r.errors.size()) + " malformed PDTB rows skipped");
      }
      return {r.explicit_corpus, r.implicit_corpus};
    }
    case Dataset::kGum: return LoadGumData(config);
    case Dataset::kTsv: return LoadTsvData(config);
  }
  throw ConfigError("unknown dataset");
}

std::uint64_t CorpusFingerprint(const Corpus& corpus) {
  Fnv1a64 h;
  h.Field(HexDigest(corpus.scheme().Fingerprint()));
  for (const auto& e : corpus.examples()) {
    h.Field(e.id).Field(corpus::Join(e.arg1)).Field(e.connective.value_or(""))
        .Field(corpus::Join(e.arg2)).Field(corpus.LabelOf(e))
        .Field(corpus::ToString(e.split));
  }
  return h.digest();
}

Summary Summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

void Aggregate(RunReport& report) {
  std::vector<double> acc, f1;
  for (const auto& r : report.per_seed) {
    acc.push_back(r.accuracy);
    f1.push_back(r.macro_f1);
  }
  report.accuracy = Summarize(acc);
  report.macro_f1 = Summarize(f1);
}

nlohmann::json RunReport::ToJson() const {
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& r : per_seed) {
    seeds.push_back({{"seed", r.seed},
                     {"accuracy", r.accuracy},
                     {"macro_f1", r.macro_f1},
                     {"train_size", r.train_size},
                     {"selected_epoch", r.selected_epoch}});
  }
  nlohmann::json j = {
      {"mode", mode},
      {"per_seed", std::move(seeds)},
      {"accuracy", {{"mean", accuracy.mean}, {"std", accuracy.std}}},
      {"macro_f1", {{"mean", macro_f1.mean}, {"std", macro_f1.std}}},
      {"config", config},
      {"corpus_fingerprints",
       {{"explicit", explicit_fingerprint}, {"implicit", implicit_fingerprint}}},
      {"notes", notes},
  };
  j["filter"] = filter ? filter->ToJson() : nlohmann::json(nullptr);
  return j;
}

RunReport RunReport::FromJson(const nlohmann::json& j) {
  RunReport r;
  try {
    r.mode = j.at("mode").get<std::string>();
    for (const auto& s : j.at("per_seed")) {
      SeedResult sr;
      sr.seed = s.at("seed").get<std::uint64_t>();
      sr.accuracy = s.at("accuracy").get<double>();
      sr.macro_f1 = s.at("macro_f1").get<double>();
      sr.train_size = s.value("train_size", std::size_t{0});
      sr.selected_epoch = s.value("selected_epoch", 0);
      r.per_seed.push_back(sr);
    }
    r.config = j.value("config", nlohmann::json::object());
    if (j.contains("corpus_fingerprints")) {
      r.explicit_fingerprint = j["corpus_fingerprints"].value("explicit", "");
      r.implicit_fingerprint = j["corpus_fingerprints"].value("implicit", "");
    }
    r.notes = j.value("notes", std::vector<std::string>{});
    if (j.contains("filter") && !j["filter"].is_null()) {
      r.filter = filtering::FilterReport::FromJson(j["filter"]);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed run report: ") + e.what());
  }
  Aggregate(r);
  return r;
}

RunReport RunCommon(const Corpus& train, const Corpus& test, encoder::F1Average average) {
  if (train.empty()) throw ConfigError("common baseline needs a non-empty train split");
  if (test.empty()) throw ConfigError("common baseline needs a non-empty test split");
  std::vector<int> counts(train.scheme().size(), 0);
  for (const auto& e : train.examples()) ++counts[train.LabelIndex(e)];
  const int best = static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                                    counts.begin());
  RunReport report;
  report.mode = "common";
  const int ties = static_cast<int>(std::count(counts.begin(), counts.end(), counts[best]));
  if (ties > 1) {
    report.notes.push_back("tie between " + std::to_string(ties) +
                           " modal labels; chose '" + train.scheme().labels()[best] +
                           "' by scheme order");
  }
  std::vector<int> gold, pred;
  for (const auto& e : test.examples()) {
    gold.push_back(test.LabelIndex(e));
    pred.push_back(best);
  }
  const encoder::Metrics m = encoder::ComputeMetrics(gold, pred, test.scheme(), average);
  report.per_seed.push_back({0, m.accuracy, m.macro_f1, train.size(), 0});
  report.notes.push_back("predicted label: " + train.scheme().labels()[best]);
  Aggregate(report);
  return report;
}

FilterStage RunFilterStage(const ExperimentConfig& config, const Corpus& explicit_train) {
  FilterStage stage;
  encoder::TrainConfig cfg = config.train_config;
  cfg.seed = config.shift_seed;
  cfg.max_epochs = config.EffectiveShiftEpochs();
  const encoder::EncoderSpec spec = config.encoder;
  const std::uint64_t seed = config.shift_seed;
  shiftmetric::ShiftResult result = shiftmetric::MeasureLabelShift(
      [&](const Corpus& c) { return encoder::EncoderClassifier::ForCorpus(c, spec, seed); },
      explicit_train, cfg);
  stage.shift_rate = shiftmetric::ShiftRate(result);
  stage.scores = result.scores;
  stage.outcome = filtering::FilterExamples(explicit_train, stage.scores, config.filter_mode,
                                            config.EffectiveFloor());
  if (const fs::path cached = CachedFilterReport(config, explicit_train); !cached.empty()) {
    fs::create_directories(cached.parent_path());
    std::ofstream out(cached);
    if (!out) throw IoError("cannot write " + cached.string());
    out << stage.outcome.report.ToJson().dump(2) << '\n';
  }
  return stage;
}

RunReport RunExperiment(const ExperimentConfig& config, const ExperimentData& data) {
  config.Validate();
  if (data.explicit_corpus.scheme().Fingerprint() !=
      data.implicit_corpus.scheme().Fingerprint()) {
    throw DataError("explicit and implicit corpora use different label schemes");
  }
  const Corpus explicit_train = data.explicit_corpus.Subset(Split::kTrain);
  const Corpus explicit_dev = data.explicit_corpus.Subset(Split::kDev);
  const Corpus implicit_train = data.implicit_corpus.Subset(Split::kTrain);
  const Corpus implicit_dev = data.implicit_corpus.Subset(Split::kDev);
  const Corpus implicit_test = data.implicit_corpus.Subset(Split::kTest);
  if (implicit_test.empty()) throw DataError("the implicit test split is empty");

  RunReport report;
  report.mode = std::string(ToString(config.mode));
  report.config = config.ToJson();
  report.explicit_fingerprint = HexDigest(CorpusFingerprint(data.explicit_corpus));
  report.implicit_fingerprint = HexDigest(CorpusFingerprint(data.implicit_corpus));

  if (config.mode == Mode::kCommon) {
    RunReport common = RunCommon(implicit_train, implicit_test, config.average);
    common.config = report.config;
    common.explicit_fingerprint = report.explicit_fingerprint;
    common.implicit_fingerprint = report.implicit_fingerprint;
    return common;
  }

  const Mode mode = config.mode;
  const bool explicit_side = mode != Mode::kI2iEntire && mode != Mode::kI2iReduced;
  const Corpus& base_train = explicit_side ? explicit_train : implicit_train;
  if (base_train.empty()) throw DataError("the training split is empty");

  std::optional<Corpus> filtered;
  if (mode == Mode::kOurs || mode == Mode::kOursNoJoint) {
    FilterStage stage = RunFilterStage(config, explicit_train);
    report.notes.push_back("shift_rate " + std::to_string(stage.shift_rate));
    report.filter = stage.outcome.report;
    filtered = stage.outcome.kept;
    if (filtered->empty()) throw DataError("filtering removed every training example");
  }
  std::size_t reduced_size = 0;
  if (mode == Mode::kE2iReduced || mode == Mode::kI2iReduced) {
    reduced_size = RecordedFilteredSize(config, explicit_train, report.notes);
    if (reduced_size == 0 || reduced_size > base_train.size()) {
      throw ConfigError("recorded filtered size " + std::to_string(reduced_size) +
                        " does not fit a training split of " +
                        std::to_string(base_train.size()));
    }
  }

  const Corpus* dev = implicit_dev.empty() ? nullptr : &implicit_dev;
  for (std::uint64_t seed : config.seeds) {
    encoder::TrainConfig cfg = config.train_config;
    cfg.seed = seed;
    Corpus train = filtered ? *filtered : base_train;
    if (reduced_size > 0) {
      train = base_train.Select(UniformSample(base_train.size(), reduced_size, seed));
    }
    SeedResult r;
    r.seed = seed;
    r.train_size = train.size();
    encoder::Metrics m;
    if (mode == Mode::kOurs || mode == Mode::kOursNoFilter) {
      jointmodel::JointConfig jc;
      jc.train = cfg;
      jc.temperature = config.temperature;
      jc.loss_weight = config.loss_weight;
      jc.selection = config.joint_selection;
      jointmodel::JointModel model = jointmodel::JointModel::ForCorpus(
          train, config.encoder, seed, config.temperature, config.loss_weight);
      const encoder::TrainingLog log = model.Train(
          train, dev, explicit_dev.empty() ? nullptr : &explicit_dev, jc);
      r.selected_epoch = log.selected_epoch;
      m = jointmodel::EvaluateJoint(model, implicit_test, config.average);
    } else {
      encoder::EncoderClassifier model =
          encoder::EncoderClassifier::ForCorpus(train, config.encoder, seed);
      const encoder::TrainingLog log = model.Train(train, dev, cfg, false);
      r.selected_epoch = log.selected_epoch;
      m = encoder::Evaluate(model, implicit_test, false, config.average);
    }
    r.accuracy = m.accuracy;
    r.macro_f1 = m.macro_f1;
    LogInfo(report.mode + " seed " + std::to_string(seed) + " macro-F1 " +
            std::to_string(r.macro_f1));
    report.per_seed.push_back(r);
  }
  if (reduced_size > 0) {
    report.notes.push_back("uniform sample without replacement, seeded by the run seed");
  }
  Aggregate(report);
  return report;
}

RunReport RunExperiment(const ExperimentConfig& config) {
  return RunExperiment(config, LoadExperimentData(config));
}

nlohmann::json SummaryTable(std::span<const RunReport> reports) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : reports) {
    rows.push_back({{"mode", r.mode},
                    {"n", r.per_seed.size()},
                    {"accuracy_mean", r.accuracy.mean},
                    {"accuracy_std", r.accuracy.std},
                    {"macro_f1_mean", r.macro_f1.mean},
                    {"macro_f1_std", r.macro_f1.std}});
  }
  return rows;
}

std::string FormatSummaryTable(std::span<const RunReport> reports) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "mode\tn\taccuracy\tmacro_f1\n";
  for (const auto& r : reports) {
    out << r.mode << '\t' << r.per_seed.size() << '\t' << 100.0 * r.accuracy.mean
        << " +- " << 100.0 * r.accuracy.std << '\t' << 100.0 * r.macro_f1.mean
        << " +- " << 100.0 * r.macro_f1.std << '\n';
  }
  return out.str();
}

}  // namespace connshift::harness
