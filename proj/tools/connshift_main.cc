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


// connshift command-line interface.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "connshift/audit/audit.h"
#include "connshift/corpus/inventory.h"
#include "connshift/corpus/io.h"
#include "connshift/corpus/transforms.h"
#include "connshift/encoder/classifier.h"
#include "connshift/error.h"
#include "connshift/factors/factors.h"
#include "connshift/filtering/filter.h"
#include "connshift/harness/config.h"
#include "connshift/harness/experiment.h"
#include "connshift/harness/synthetic.h"
#include "connshift/jointmodel/joint_model.h"
#include "connshift/shiftmetric/shift.h"

namespace fs = std::filesystem;
using namespace connshift;
using nlohmann::json;

namespace {

// Config keys exposed as --flags (underscores become dashes).
const char* const kConfigKeys[] = {
    "dataset",      "level",         "mode",         "seeds",
    "lr",           "batch_size",    "epochs",       "max_input_length",
    "weight_decay", "max_grad_norm", "encoder_id",   "hidden_dim",
    "num_layers",   "num_heads",     "ffn_dim",      "filter_mode",
    "gum_floor",    "shift_epochs",  "shift_seed",   "temperature",
    "loss_weight",  "joint_selection", "f1_average", "min_frequency",
    "scheme",       "data_root",     "cache_dir",    "filter_report",
    "device",
};

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void Register(CLI::App* app, bool with_mode) {
    app->add_option("--config", config_path, "key = value experiment config file");
    for (const char* key : kConfigKeys) {
      std::string k = key;
      if (!with_mode && k == "mode") continue;
      std::string flag = "--" + k;
      for (char& c : flag) c = c == '_' ? '-' : c;
      app->add_option(flag, values[k], "config key '" + k + "'");
    }
    app->add_option("--data", values["data_root"], "alias of --data-root");
  }

  harness::ExperimentConfig Build() const {
    harness::ExperimentConfig c;
    if (!config_path.empty()) c = harness::LoadConfig(config_path);
    for (const auto& [k, v] : values) {
      if (!v.empty()) harness::SetConfigValue(c, k, v);
    }
    harness::ApplyEnvironment(c);
    return c;
  }
};

void WriteJson(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

json ReadJson(const std::string& path) {
  if (fs::is_directory(path)) throw IoError(path + " is a directory");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

json MetricsJson(const encoder::Metrics& m) {
  return {{"accuracy", m.accuracy}, {"macro_f1", m.macro_f1}, {"per_label_f1", m.per_label_f1}};
}

json StatsJson(const corpus::Corpus& c) {
  const corpus::CountTable t = corpus::CorpusStats(c);
  json j = json::object();
  for (const auto& [split, counts] : t.counts) {
    json s = counts;
    s["total"] = t.Total(split);
    j[std::string(corpus::ToString(split))] = std::move(s);
  }
  j["total"] = t.Total();
  return j;
}

const corpus::Corpus& PickModality(const harness::ExperimentData& d, const std::string& m) {
  if (m == "explicit") return d.explicit_corpus;
  if (m == "implicit") return d.implicit_corpus;
  throw ConfigError("modality must be explicit or implicit");
}

corpus::Corpus PickSplit(const corpus::Corpus& c, const std::string& split) {
  if (split == "all") return c;
  return c.Subset(corpus::SplitFromString(split));
}

// Scores aligned with `c`; every example must appear in the score file.
std::vector<double> AlignScores(const corpus::Corpus& c,
                                const std::map<std::string, double>& by_id) {
  std::vector<double> out;
  out.reserve(c.size());
  for (const auto& e : c.examples()) {
    auto it = by_id.find(e.id);
    if (it == by_id.end()) throw DataError("no shift score for example " + e.id);
    out.push_back(it->second);
  }
  return out;
}

corpus::Corpus ScoredSubset(const corpus::Corpus& c, const std::map<std::string, double>& by_id) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (by_id.count(c[i].id)) keep.push_back(i);
  }
  if (keep.size() != by_id.size()) {
    throw DataError("score file lists examples that are not in the explicit corpus");
  }
  return c.Select(keep);
}

int RunIngest(const ConfigFlags& flags, bool synthetic, std::uint64_t syn_seed,
              const std::string& out_dir) {
  std::vector<corpus::DiscourseExample> all;
  json summary;
  if (synthetic) {
    harness::SyntheticOptions o = harness::SyntheticOptions::Default();
    o.seed = syn_seed;
    const harness::SyntheticCorpus syn = harness::GenerateSynthetic(o);
    all = syn.explicit_examples;
    all.insert(all.end(), syn.implicit_examples.begin(), syn.implicit_examples.end());
    summary["planted_shift_rate"] = o.PlantedShiftRate();
    summary["explicit"] = StatsJson(syn.ExplicitCorpus());
    summary["implicit"] = StatsJson(syn.ImplicitCorpus());
  } else {
    const harness::ExperimentConfig c = flags.Build();
    const harness::ExperimentData d = harness::LoadExperimentData(c);
    all.assign(d.explicit_corpus.examples().begin(), d.explicit_corpus.examples().end());
    all.insert(all.end(), d.implicit_corpus.examples().begin(),
               d.implicit_corpus.examples().end());
    summary["explicit"] = StatsJson(d.explicit_corpus);
    summary["implicit"] = StatsJson(d.implicit_corpus);
  }
  if (out_dir.empty()) throw ConfigError("ingest needs --out");
  corpus::WriteCorpusDir(out_dir, all);
  summary["out"] = out_dir;
  WriteJson(summary, "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"connshift: label shift analysis and mitigation for discourse relations"};
  app.require_subcommand(1);

  // ingest
  ConfigFlags ingest_flags;
  bool synthetic = false;
  std::uint64_t syn_seed = 7;
  std::string ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Load a corpus and write canonical TSV splits");
  ingest_flags.Register(ingest, false);
  ingest->add_flag("--synthetic", synthetic, "generate the planted-shift synthetic corpus");
  ingest->add_option("--synthetic-seed", syn_seed, "seed of the synthetic generator");
  ingest->add_option("--out", ingest_out, "output corpus directory")->required();

  // stats
  ConfigFlags stats_flags;
  auto* stats = app.add_subcommand("stats", "Per-split, per-label counts");
  stats_flags.Register(stats, false);

  // train
  ConfigFlags train_flags;
  std::string train_modality = "explicit", train_out;
  bool with_connective = false;
  auto* train = app.add_subcommand("train", "Train a relation classifier");
  train_flags.Register(train, false);
  train->add_option("--modality", train_modality, "explicit or implicit");
  train->add_flag("--with-connective", with_connective, "feed connectives to the model");
  train->add_option("--out", train_out, "checkpoint path");

  // measure-shift
  ConfigFlags shift_flags;
  std::string shift_modality = "explicit", shift_split = "train", shift_out, shift_reps;
  auto* shift = app.add_subcommand("measure-shift", "Label shift metric and per-example scores");
  shift_flags.Register(shift, false);
  shift->add_option("--modality", shift_modality, "explicit or implicit");
  shift->add_option("--split", shift_split, "train, dev, test or all");
  shift->add_option("--out", shift_out, "score file (TSV)");
  shift->add_option("--representations", shift_reps, "stem for representation exports");

  // factors
  ConfigFlags factor_flags;
  std::string factor_scores, factor_table, factor_report, inventory_path;
  auto* factors_cmd = app.add_subcommand("factors", "Factor correlations and importances");
  factor_flags.Register(factors_cmd, false);
  factors_cmd->add_option("--scores", factor_scores, "score file from measure-shift")->required();
  factors_cmd->add_option("--table", factor_table, "factor table output (TSV)");
  factors_cmd->add_option("--report", factor_report, "analysis report (JSON)");
  factors_cmd->add_option("--inventory", inventory_path, "connective inventory TSV");

  // filter
  ConfigFlags filter_flags;
  std::string filter_scores, filter_out, filter_report_path;
  auto* filter = app.add_subcommand("filter", "Drop low-scoring explicit training examples");
  filter_flags.Register(filter, false);
  filter->add_option("--scores", filter_scores, "score file from measure-shift")->required();
  filter->add_option("--out", filter_out, "filtered corpus directory");
  filter->add_option("--report", filter_report_path, "filter report (JSON)");

  // train-joint
  ConfigFlags joint_flags;
  std::string joint_out;
  auto* joint = app.add_subcommand("train-joint", "Train the joint connective/relation model");
  joint_flags.Register(joint, false);
  joint->add_option("--out", joint_out, "checkpoint path");

  // run
  ConfigFlags run_flags;
  std::string run_out;
  auto* run = app.add_subcommand("run", "Run one or more experiment modes over seeds");
  run_flags.Register(run, true);
  run->add_option("--out", run_out, "report file (one mode) or directory (several)");

  // audit
  std::string audit_a, audit_b, audit_out;
  auto* audit_cmd = app.add_subcommand("audit", "Categorize label-shift cases");
  audit_cmd->add_option("--annotations", audit_a, "annotation TSV")->required();
  audit_cmd->add_option("--second", audit_b, "second annotator TSV for kappa");
  audit_cmd->add_option("--out", audit_out, "report (JSON)");

  // report
  std::vector<std::string> report_inputs;
  bool report_json = false;
  auto* report = app.add_subcommand("report", "Summarize run reports");
  report->add_option("reports", report_inputs, "run report JSON files or directories of them")->required();
  report->add_flag("--json", report_json, "print JSON instead of a table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return RunIngest(ingest_flags, synthetic, syn_seed, ingest_out);

    if (*stats) {
      const harness::ExperimentData d = harness::LoadExperimentData(stats_flags.Build());
      WriteJson({{"explicit", StatsJson(d.explicit_corpus)},
                 {"implicit", StatsJson(d.implicit_corpus)}},
                "");
      return 0;
    }

    if (*train) {
      const harness::ExperimentConfig c = train_flags.Build();
      c.Validate();
      const harness::ExperimentData d = harness::LoadExperimentData(c);
      const corpus::Corpus& side = PickModality(d, train_modality);
      const corpus::Corpus tr = side.Subset(corpus::Split::kTrain);
      const corpus::Corpus dev = side.Subset(corpus::Split::kDev);
      encoder::TrainConfig cfg = c.train_config;
      cfg.seed = c.seeds.front();
      auto model = encoder::EncoderClassifier::ForCorpus(tr, c.encoder, cfg.seed);
      const encoder::TrainingLog log =
          model.Train(tr, dev.empty() ? nullptr : &dev, cfg, with_connective);
      if (!train_out.empty()) model.Save(train_out);
      json out = {{"selected_epoch", log.selected_epoch}, {"train_size", tr.size()}};
      const corpus::Corpus test = side.Subset(corpus::Split::kTest);
      if (!test.empty()) {
        out["test"] = MetricsJson(encoder::Evaluate(model, test, with_connective, c.average));
      }
      const corpus::Corpus imp_test = d.implicit_corpus.Subset(corpus::Split::kTest);
      if (!imp_test.empty()) {
        out["implicit_test"] = MetricsJson(encoder::Evaluate(model, imp_test, false, c.average));
      }
      WriteJson(out, "");
      return 0;
    }

    if (*shift) {
      const harness::ExperimentConfig c = shift_flags.Build();
      c.Validate();
      const harness::ExperimentData d = harness::LoadExperimentData(c);
      const corpus::Corpus target = PickSplit(PickModality(d, shift_modality), shift_split);
      encoder::TrainConfig cfg = c.train_config;
      cfg.seed = c.shift_seed;
      cfg.max_epochs = c.EffectiveShiftEpochs();
      const encoder::EncoderSpec spec = c.encoder;
      const std::uint64_t seed = c.shift_seed;
      encoder::EncoderClassifier model = encoder::EncoderClassifier::ForCorpus(target, spec, seed);
      const shiftmetric::ShiftResult r = shiftmetric::MeasureLabelShift(
          [&](const corpus::Corpus& x) {
            return encoder::EncoderClassifier::ForCorpus(x, spec, seed);
          },
          target, cfg, &model);
      if (!shift_out.empty()) shiftmetric::WriteScoreFile(fs::path(shift_out), target, r);
      if (!shift_reps.empty()) {
        shiftmetric::WriteRepresentations(
            shift_reps + "_without", shiftmetric::ExportRepresentations(model, target, false));
        shiftmetric::WriteRepresentations(
            shift_reps + "_with", shiftmetric::ExportRepresentations(model, target, true));
      }
      json by_rel = json::object();
      for (const auto& [label, b] : shiftmetric::BreakdownByRelation(target, r)) {
        by_rel[label] = {{"n", b.n}, {"shift_rate", b.shift_rate},
                         {"fraction_below", b.fraction_below}};
      }
      WriteJson({{"n", r.n},
                 {"diff_num", r.diff_num},
                 {"shift_rate", shiftmetric::ShiftRate(r)},
                 {"fraction_below_0.5", shiftmetric::FractionBelow(r.scores)},
                 {"train_accuracy", encoder::Evaluate(model, target, false).accuracy},
                 {"by_relation", by_rel}},
                "");
      return 0;
    }

    if (*factors_cmd) {
      const harness::ExperimentConfig c = factor_flags.Build();
      const harness::ExperimentData d = harness::LoadExperimentData(c);
      const auto by_id = shiftmetric::ReadScoreFile(factor_scores);
      const corpus::Corpus scored = ScoredSubset(d.explicit_corpus, by_id);
      const corpus::ConnectiveInventory inventory =
          inventory_path.empty() ? corpus::ConnectiveInventory::Default()
                                 : corpus::ConnectiveInventory::Load(inventory_path);
      const factors::FactorTable table =
          factors::BuildFactorTable(scored, AlignScores(scored, by_id), inventory);
      if (!factor_table.empty()) factors::WriteFactorTable(factor_table, table);
      std::vector<std::vector<std::string>> subsets;
      const std::vector<std::string> names(factors::kFactorNames.begin(),
                                           factors::kFactorNames.end());
      for (unsigned mask = 1; mask < 16; ++mask) {
        std::vector<std::string> s;
        for (int b = 0; b < 4; ++b) {
          if (mask & (1u << b)) s.push_back(names[b]);
        }
        if (s.size() >= 2) subsets.push_back(std::move(s));
      }
      factors::GbdtConfig g;
      g.seed = c.seeds.front();
      WriteJson(factors::AnalysisReport(table, subsets, g), factor_report);
      return 0;
    }

    if (*filter) {
      const harness::ExperimentConfig c = filter_flags.Build();
      const harness::ExperimentData d = harness::LoadExperimentData(c);
      const auto by_id = shiftmetric::ReadScoreFile(filter_scores);
      const corpus::Corpus explicit_train = d.explicit_corpus.Subset(corpus::Split::kTrain);
      const corpus::Corpus scored = ScoredSubset(explicit_train, by_id);
      if (scored.size() != explicit_train.size()) {
        throw DataError("the score file must cover the explicit train split exactly");
      }
      const filtering::FilterOutcome f = filtering::FilterExamples(
          scored, AlignScores(scored, by_id), c.filter_mode, c.EffectiveFloor());
      if (!filter_out.empty()) {
        std::vector<corpus::DiscourseExample> all(f.kept.examples().begin(),
                                                  f.kept.examples().end());
        for (const auto& e : d.explicit_corpus.examples()) {
          if (e.split != corpus::Split::kTrain) all.push_back(e);
        }
        all.insert(all.end(), d.implicit_corpus.examples().begin(),
                   d.implicit_corpus.examples().end());
        corpus::WriteCorpusDir(filter_out, all);
      }
      WriteJson(f.report.ToJson(), filter_report_path);
      if (!filter_report_path.empty()) {
        WriteJson({{"kept", f.report.kept}, {"dropped", f.report.dropped}}, "");
      }
      return 0;
    }

    if (*joint) {
      const harness::ExperimentConfig c = joint_flags.Build();
      c.Validate();
      const harness::ExperimentData d = harness::LoadExperimentData(c);
      const corpus::Corpus tr = d.explicit_corpus.Subset(corpus::Split::kTrain);
      const corpus::Corpus imp_dev = d.implicit_corpus.Subset(corpus::Split::kDev);
      const corpus::Corpus exp_dev = d.explicit_corpus.Subset(corpus::Split::kDev);
      jointmodel::JointConfig jc;
      jc.train = c.train_config;
      jc.train.seed = c.seeds.front();
      jc.temperature = c.temperature;
      jc.loss_weight = c.loss_weight;
      jc.selection = c.joint_selection;
      auto model = jointmodel::JointModel::ForCorpus(tr, c.encoder, jc.train.seed,
                                                     c.temperature, c.loss_weight);
      const encoder::TrainingLog log =
          model.Train(tr, imp_dev.empty() ? nullptr : &imp_dev,
                      exp_dev.empty() ? nullptr : &exp_dev, jc);
      if (!joint_out.empty()) model.Save(joint_out);
      json out = {{"selected_epoch", log.selected_epoch},
                  {"train_size", tr.size()},
                  {"connectives", model.num_connectives()}};
      const corpus::Corpus imp_test = d.implicit_corpus.Subset(corpus::Split::kTest);
      if (!imp_test.empty()) {
        out["implicit_test"] = MetricsJson(jointmodel::EvaluateJoint(model, imp_test, c.average));
      }
      WriteJson(out, "");
      return 0;
    }

    if (*run) {
      // --mode may hold a comma list; it is split below.
      ConfigFlags single = run_flags;
      single.values["mode"].clear();
      harness::ExperimentConfig c = single.Build();
      std::vector<harness::Mode> modes;
      const std::string mode_list =
          run_flags.values.at("mode").empty() ? std::string(harness::ToString(c.mode))
                                              : run_flags.values.at("mode");
      std::stringstream ss(mode_list);
      std::string m;
      while (std::getline(ss, m, ',')) {
        if (!m.empty()) modes.push_back(harness::ModeFromString(m));
      }
      c.Validate();
      const harness::ExperimentData d = harness::LoadExperimentData(c);
      std::vector<harness::RunReport> reports;
      for (harness::Mode mode : modes) {
        c.mode = mode;
        reports.push_back(harness::RunExperiment(c, d));
        if (modes.size() > 1 && !run_out.empty()) {
          WriteJson(reports.back().ToJson(),
                    (fs::path(run_out) / (reports.back().mode + ".json")).string());
        }
      }
      if (modes.size() == 1) {
        WriteJson(reports.front().ToJson(), run_out);
        if (!run_out.empty()) std::cout << harness::FormatSummaryTable(reports);
      } else {
        std::cout << harness::FormatSummaryTable(reports);
      }
      return 0;
    }

    if (*audit_cmd) {
      const auto a = audit::ReadAnnotations(audit_a);
      const auto b = audit_b.empty() ? std::vector<audit::AnnotationPair>{}
                                     : audit::ReadAnnotations(audit_b);
      WriteJson(audit::AuditReport(a, b), audit_out);
      return 0;
    }

    if (*report) {
      std::vector<harness::RunReport> reports;
      for (const auto& p : report_inputs) {
        if (!fs::is_directory(p)) {
          reports.push_back(harness::RunReport::FromJson(ReadJson(p)));
          continue;
        }
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(p)) {
          if (entry.path().extension() == ".json") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
          reports.push_back(harness::RunReport::FromJson(ReadJson(f.string())));
        }
      }
      if (reports.empty()) throw UsageError("no run reports found");
      if (report_json) {
        WriteJson(harness::SummaryTable(reports), "");
      } else {
        std::cout << harness::FormatSummaryTable(reports);
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
