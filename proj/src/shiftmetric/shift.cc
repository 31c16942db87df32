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


#include "connshift/shiftmetric/shift.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "connshift/corpus/io.h"
#include "connshift/error.h"

namespace connshift::shiftmetric {

double Cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw UsageError("cosine of unequal lengths");
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw UndefinedError("cosine of a zero vector");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

ShiftResult ScoreShift(const encoder::EncoderClassifier& model,
                       const corpus::Corpus& corpus) {
  for (const auto& e : corpus.examples()) {
    if (!e.connective) {
      throw DataError("example " + e.id + " has no connective to remove");
    }
  }
  ShiftResult r;
  r.n = corpus.size();
  r.scores.reserve(r.n);
  for (const auto& e : corpus.examples()) {
    const int p1 = model.Predict(e, false);
    const int p2 = model.Predict(e, true);
    r.pred_without.push_back(p1);
    r.pred_with.push_back(p2);
    if (p1 != p2) ++r.diff_num;
    r.scores.push_back(Cosine(model.GetRep(e, false), model.GetRep(e, true)));
    r.ids.push_back(e.id);
  }
  return r;
}

ShiftResult MeasureLabelShift(const ModelFactory& factory,
                              const corpus::Corpus& corpus,
                              const encoder::TrainConfig& config,
                              encoder::EncoderClassifier* trained,
                              encoder::TrainingLog* log) {
  for (const auto& e : corpus.examples()) {
    if (!e.connective) {
      throw DataError("example " + e.id + " has no connective to remove");
    }
  }
  encoder::EncoderClassifier model = factory(corpus);
  encoder::TrainingLog training = model.Train(corpus, nullptr, config, false);
  ShiftResult r = ScoreShift(model, corpus);
  if (log) *log = std::move(training);
  if (trained) *trained = std::move(model);
  return r;
}

double ShiftRate(const ShiftResult& result) {
  if (result.n == 0) throw UndefinedError("shift rate of an empty result");
  return static_cast<double>(result.diff_num) / static_cast<double>(result.n);
}

double FractionBelow(std::span<const double> scores, double threshold) {
  if (scores.empty()) throw UndefinedError("fraction of an empty score list");
  const auto below = std::count_if(scores.begin(), scores.end(),
                                   [threshold](double s) { return s < threshold; });
  return static_cast<double>(below) / static_cast<double>(scores.size());
}

std::map<std::string, RelationBreakdown> BreakdownByRelation(
    const corpus::Corpus& corpus, const ShiftResult& result, double threshold) {
  if (corpus.size() != result.n) {
    throw UsageError("result does not belong to this corpus");
  }
  std::map<std::string, RelationBreakdown> out;
  std::map<std::string, int> below;
  for (std::size_t i = 0; i < result.n; ++i) {
    const std::string& label = corpus.LabelOf(corpus[i]);
    RelationBreakdown& b = out[label];
    ++b.n;
    if (result.pred_without[i] != result.pred_with[i]) ++b.diff_num;
    b.mean_score += result.scores[i];
    if (result.scores[i] < threshold) ++below[label];
  }
  for (auto& [label, b] : out) {
    const double n = static_cast<double>(b.n);
    b.shift_rate = b.diff_num / n;
    b.mean_score /= n;
    b.fraction_below = below[label] / n;
  }
  return out;
}

RepresentationExport ExportRepresentations(
    const encoder::EncoderClassifier& model, const corpus::Corpus& corpus,
    bool with_connective) {
  RepresentationExport out;
  out.with_connective = with_connective;
  out.rows.resize(static_cast<Eigen::Index>(corpus.size()), model.hidden_dim());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& e = corpus[i];
    out.rows.row(static_cast<Eigen::Index>(i)) =
        model.GetRep(e, with_connective).transpose();
    out.ids.push_back(e.id);
    out.labels.push_back(corpus.LabelOf(e));
  }
  return out;
}

void WriteScoreFile(std::ostream& out, const corpus::Corpus& corpus,
                    const ShiftResult& result) {
  if (corpus.size() != result.n) {
    throw UsageError("result does not belong to this corpus");
  }
  const auto& labels = corpus.scheme().labels();
  out << "example_id\tlabel\tp_without\tp_with\tcosine\n";
  out.precision(17);
  for (std::size_t i = 0; i < result.n; ++i) {
    out << corpus::EscapeField(result.ids[i]) << '\t'
        << corpus.LabelOf(corpus[i]) << '\t' << labels[result.pred_without[i]]
        << '\t' << labels[result.pred_with[i]] << '\t' << result.scores[i]
        << '\n';
  }
}

void WriteScoreFile(const std::filesystem::path& path,
                    const corpus::Corpus& corpus, const ShiftResult& result) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  WriteScoreFile(out, corpus, result);
}

std::map<std::string, double> ReadScoreFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open score file " + path.string());
  std::string line;
  std::getline(in, line);
  std::map<std::string, double> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (cols.size() != 5) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected 5 columns");
    }
    try {
      out[corpus::UnescapeField(cols[0])] = std::stod(cols[4]);
    } catch (const std::exception&) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": bad cosine value");
    }
  }
  return out;
}

void WriteRepresentations(const std::filesystem::path& stem,
                          const RepresentationExport& data) {
  std::filesystem::path tsv = stem;
  tsv += ".tsv";
  std::filesystem::path meta = stem;
  meta += ".json";
  std::ofstream out(tsv);
  if (!out) throw IoError("cannot write " + tsv.string());
  out.precision(17);
  out << "id\tlabel";
  for (Eigen::Index c = 0; c < data.rows.cols(); ++c) out << "\tv" << c;
  out << '\n';
  for (Eigen::Index r = 0; r < data.rows.rows(); ++r) {
    out << corpus::EscapeField(data.ids[r]) << '\t' << data.labels[r];
    for (Eigen::Index c = 0; c < data.rows.cols(); ++c) {
      out << '\t' << data.rows(r, c);
    }
    out << '\n';
  }
  nlohmann::json header = {
      {"n", data.rows.rows()},
      {"hidden_dim", data.rows.cols()},
      {"condition", data.with_connective ? "with_connective" : "without_connective"}};
  std::ofstream(meta) << header.dump(2) << '\n';
}

}  // namespace connshift::shiftmetric
