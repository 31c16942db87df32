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


#include "connshift/factors/factors.h"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "connshift/corpus/io.h"
#include "connshift/error.h"
#include "connshift/log.h"

namespace connshift::factors {

double FactorValue(const FactorVector& f, std::string_view name) {
  if (name == "conj_vs_adv") return f.conj_vs_adv;
  if (name == "ambiguous") return f.ambiguous;
  if (name == "intra_vs_inter") return f.intra_vs_inter;
  if (name == "norm_length") return f.norm_length;
  throw UsageError("unknown factor '" + std::string(name) + "'");
}

namespace {

int WordCount(const corpus::DiscourseExample& e) {
  return static_cast<int>(e.arg1.size() + e.arg2.size());
}

}  // namespace

LengthRange WordCountRange(std::span<const corpus::DiscourseExample> examples) {
  LengthRange r;
  if (examples.empty()) return r;
  r.min_words = r.max_words = WordCount(examples.front());
  for (const auto& e : examples) {
    r.min_words = std::min(r.min_words, WordCount(e));
    r.max_words = std::max(r.max_words, WordCount(e));
  }
  return r;
}

FactorVector ExtractFactors(const corpus::DiscourseExample& example,
                            const corpus::ConnectiveInventory& inventory,
                            const LengthRange& range) {
  FactorVector f;
  const corpus::ConnectiveEntry entry =
      inventory.Lookup(example.connective.value_or(""));
  corpus::ConnSyntax syntax = example.conn_syntax;
  if (syntax == corpus::ConnSyntax::kUnknown) syntax = entry.syntax;
  f.conj_vs_adv = syntax == corpus::ConnSyntax::kConjunction ? 1 : 0;
  f.ambiguous = entry.ambiguous() ? 1 : 0;
  f.intra_vs_inter =
      example.arg_status == corpus::ArgStatus::kIntraSentential ? 1 : 0;
  const int span = range.max_words - range.min_words;
  if (span > 0) {
    const double v =
        static_cast<double>(WordCount(example) - range.min_words) / span;
    f.norm_length = std::clamp(v, 0.0, 1.0);
  }
  return f;
}

std::vector<double> FactorTable::Column(std::string_view name) const {
  std::vector<double> out;
  out.reserve(factors.size());
  for (const auto& f : factors) out.push_back(FactorValue(f, name));
  return out;
}

FactorTable BuildFactorTable(const corpus::Corpus& corpus,
                             std::span<const double> scores,
                             const corpus::ConnectiveInventory& inventory) {
  if (scores.size() != corpus.size()) {
    throw DataError("got " + std::to_string(scores.size()) + " scores for " +
                    std::to_string(corpus.size()) + " examples");
  }
  FactorTable t;
  t.range = WordCountRange(corpus.examples());
  if (t.range.max_words == t.range.min_words && !corpus.empty()) {
    LogWarning("all examples have the same length; norm_length is 0");
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& e = corpus[i];
    if (!e.connective || e.connective->empty()) {
      throw DataError("example " + e.id + " has no connective");
    }
    t.ids.push_back(e.id);
    t.factors.push_back(ExtractFactors(e, inventory, t.range));
    t.scores.push_back(scores[i]);
  }
  return t;
}

void WriteFactorTable(const std::filesystem::path& path, const FactorTable& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "example_id\tconj_vs_adv\tambiguous\tintra_vs_inter\tnorm_length\t"
         "shift_score\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    const FactorVector& f = table.factors[i];
    out << corpus::EscapeField(table.ids[i]) << '\t' << f.conj_vs_adv << '\t'
        << f.ambiguous << '\t' << f.intra_vs_inter << '\t' << f.norm_length
        << '\t' << table.scores[i] << '\n';
  }
}

FactorTable ReadFactorTable(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open factor table " + path.string());
  std::string line;
  std::getline(in, line);
  FactorTable t;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (cols.size() != 6) throw DataError(where + ": expected 6 columns");
    FactorVector f;
    try {
      f.conj_vs_adv = std::stoi(cols[1]);
      f.ambiguous = std::stoi(cols[2]);
      f.intra_vs_inter = std::stoi(cols[3]);
      f.norm_length = std::stod(cols[4]);
      t.scores.push_back(std::stod(cols[5]));
    } catch (const std::exception&) {
      throw DataError(where + ": malformed number");
    }
    for (int b : {f.conj_vs_adv, f.ambiguous, f.intra_vs_inter}) {
      if (b != 0 && b != 1) throw DataError(where + ": binary factor not in {0,1}");
    }
    if (f.norm_length < 0.0 || f.norm_length > 1.0) {
      throw DataError(where + ": norm_length outside [0,1]");
    }
    t.ids.push_back(corpus::UnescapeField(cols[0]));
    t.factors.push_back(f);
  }
  return t;
}

Correlation Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw UsageError("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw UsageError("pearson needs at least 3 pairs");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v[0]; });
  };
  if (constant(x) || constant(y)) {
    throw UndefinedError("pearson: zero variance, correlation undefined");
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  Correlation c;
  c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(n - 2);
  const double one_minus = 1.0 - c.r * c.r;
  if (one_minus <= 0.0) {
    c.p_value = 0.0;
  } else {
    const double t = std::abs(c.r) * std::sqrt(df / one_minus);
    boost::math::students_t dist(df);
    c.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
  }
  return c;
}

namespace {

class Booster {
 public:
  Booster(const std::vector<std::vector<double>>& rows, const GbdtConfig& cfg)
      : rows_(rows), cfg_(cfg), k_(rows.empty() ? 0 : rows[0].size()),
        gain_(k_, 0.0), splits_(k_, 0) {}

  void Fit(std::span<const double> y) {
    const std::size_t n = rows_.size();
    std::vector<double> pred(n, 0.0), grad(n);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (int t = 0; t < cfg_.num_trees; ++t) {
      for (std::size_t i = 0; i < n; ++i) grad[i] = pred[i] - y[i];
      Grow(all, grad, pred, 0);
    }
  }

  std::vector<double> AverageGain() const {
    std::vector<double> out(k_, 0.0);
    for (std::size_t f = 0; f < k_; ++f) {
      if (splits_[f] > 0) out[f] = gain_[f] / splits_[f];
    }
    return out;
  }

 private:
  double Score(double g, double h) const { return g * g / (h + cfg_.lambda); }

  void Grow(const std::vector<std::size_t>& idx, const std::vector<double>& grad,
            std::vector<double>& pred, int depth) {
    double g_total = 0.0;
    for (std::size_t i : idx) g_total += grad[i];
    const double h_total = static_cast<double>(idx.size());
    int best_feature = -1;
    double best_gain = 1e-12, best_threshold = 0.0;
    if (depth < cfg_.max_depth &&
        idx.size() >= 2 * static_cast<std::size_t>(cfg_.min_samples_leaf)) {
      std::vector<std::size_t> order = idx;
      for (std::size_t f = 0; f < k_; ++f) {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return rows_[a][f] < rows_[b][f];
        });
        double g_left = 0.0;
        for (std::size_t j = 0; j + 1 < order.size(); ++j) {
          g_left += grad[order[j]];
          const double v = rows_[order[j]][f], next = rows_[order[j + 1]][f];
          if (v == next) continue;
          const double h_left = static_cast<double>(j + 1);
          const double h_right = h_total - h_left;
          if (h_left < cfg_.min_samples_leaf || h_right < cfg_.min_samples_leaf) continue;
          const double gain = 0.5 * (Score(g_left, h_left) +
                                     Score(g_total - g_left, h_right) -
                                     Score(g_total, h_total));
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = static_cast<int>(f);
            best_threshold = 0.5 * (v + next);
          }
        }
      }
    }
    if (best_feature < 0) {
      const double w = -cfg_.learning_rate * g_total / (h_total + cfg_.lambda);
      for (std::size_t i : idx) pred[i] += w;
      return;
    }
    gain_[best_feature] += best_gain;
    ++splits_[best_feature];
    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) {
      (rows_[i][best_feature] < best_threshold ? left : right).push_back(i);
    }
    Grow(left, grad, pred, depth + 1);
    Grow(right, grad, pred, depth + 1);
  }

  const std::vector<std::vector<double>>& rows_;
  const GbdtConfig& cfg_;
  std::size_t k_;
  std::vector<double> gain_;
  std::vector<int> splits_;
};

}  // namespace

std::vector<double> GbdtImportance(const std::vector<std::vector<double>>& rows,
                                   std::span<const double> targets,
                                   const GbdtConfig& config) {
  if (rows.size() != targets.size()) {
    throw UsageError("gbdt: features and targets are not aligned");
  }
  if (rows.empty()) throw UsageError("gbdt: no training rows");
  const std::size_t k = rows[0].size();
  if (k < 2) throw UsageError("gbdt needs at least two features");
  for (const auto& r : rows) {
    if (r.size() != k) throw UsageError("gbdt: ragged feature rows");
  }
  if (config.num_trees < 1 || config.max_depth < 1 || !(config.learning_rate > 0.0) ||
      config.lambda < 0.0 || config.min_samples_leaf < 1) {
    throw ConfigError("invalid gbdt configuration");
  }
  std::vector<bool> varies(k, false);
  for (std::size_t f = 0; f < k; ++f) {
    for (const auto& r : rows) varies[f] = varies[f] || r[f] != rows[0][f];
  }
  if (std::none_of(varies.begin(), varies.end(), [](bool b) { return b; })) {
    throw UndefinedError("gbdt: every selected feature is constant");
  }
  Booster booster(rows, config);
  booster.Fit(targets);
  std::vector<double> imp = booster.AverageGain();
  const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
  if (total > 0.0) {
    for (double& v : imp) v /= total;
  } else {
    // Constant target: no split helps; spread evenly over varying features.
    LogWarning("gbdt: no split reduced the loss; importances are uniform");
    const double n = static_cast<double>(std::count(varies.begin(), varies.end(), true));
    for (std::size_t f = 0; f < k; ++f) imp[f] = varies[f] ? 1.0 / n : 0.0;
  }
  return imp;
}

std::map<std::string, double> GbdtImportance(
    std::span<const FactorVector> features, std::span<const double> targets,
    std::span<const std::string> feature_subset, const GbdtConfig& config) {
  if (feature_subset.size() < 2) throw UsageError("gbdt needs at least two features");
  for (const auto& name : feature_subset) {
    if (std::find(kFactorNames.begin(), kFactorNames.end(), name) == kFactorNames.end()) {
      throw UsageError("unknown factor '" + name + "'");
    }
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(features.size());
  for (const auto& f : features) {
    std::vector<double> row;
    for (const auto& name : feature_subset) row.push_back(FactorValue(f, name));
    rows.push_back(std::move(row));
  }
  for (std::size_t c = 0; c < feature_subset.size() && !rows.empty(); ++c) {
    bool varies = false;
    for (const auto& r : rows) varies = varies || r[c] != rows[0][c];
    if (!varies) LogWarning("factor '" + feature_subset[c] + "' is constant; importance 0");
  }
  const std::vector<double> imp = GbdtImportance(rows, targets, config);
  std::map<std::string, double> out;
  for (std::size_t c = 0; c < feature_subset.size(); ++c) out[feature_subset[c]] = imp[c];
  return out;
}

nlohmann::json AnalysisReport(const FactorTable& table,
                              const std::vector<std::vector<std::string>>& subsets,
                              const GbdtConfig& config) {
  nlohmann::json report;
  report["n"] = table.size();
  report["norm_length_range"] = {{"min_words", table.range.min_words},
                                 {"max_words", table.range.max_words}};
  report["gbdt"] = {{"num_trees", config.num_trees},
                    {"max_depth", config.max_depth},
                    {"learning_rate", config.learning_rate},
                    {"lambda", config.lambda},
                    {"min_samples_leaf", config.min_samples_leaf},
                    {"seed", config.seed},
                    {"importance", "average_gain"}};
  nlohmann::json corr = nlohmann::json::object();
  for (std::string_view name : kFactorNames) {
    try {
      Correlation c = Pearson(table.Column(name), table.scores);
      corr[std::string(name)] = {{"r", c.r}, {"p_value", c.p_value}};
    } catch (const UndefinedError& e) {
      corr[std::string(name)] = {{"error", e.what()}};
    }
  }
  report["correlations"] = std::move(corr);
  nlohmann::json imps = nlohmann::json::array();
  for (const auto& subset : subsets) {
    nlohmann::json entry = {{"features", subset}};
    try {
      entry["importance"] = GbdtImportance(table.factors, table.scores, subset, config);
    } catch (const UndefinedError& e) {
      entry["error"] = e.what();
    }
    imps.push_back(std::move(entry));
  }
  report["importance"] = std::move(imps);
  return report;
}

}  // namespace connshift::factors
