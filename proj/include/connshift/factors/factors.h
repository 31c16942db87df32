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


// Connective and argument factors of explicit examples, their correlation
// with the shift score, and gradient-boosted importance rankings.

#ifndef CONNSHIFT_FACTORS_FACTORS_H_
#define CONNSHIFT_FACTORS_FACTORS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "connshift/corpus/inventory.h"
#include "connshift/corpus/types.h"

namespace connshift::factors {

struct FactorVector {
  int conj_vs_adv = 0;     // 1 = conjunction
  int ambiguous = 0;
  int intra_vs_inter = 0;  // 1 = intra-sentential
  double norm_length = 0.0;

  friend bool operator==(const FactorVector&, const FactorVector&) = default;
};

inline constexpr std::array<std::string_view, 4> kFactorNames = {
    "conj_vs_adv", "ambiguous", "intra_vs_inter", "norm_length"};

// Throws UsageError for an unknown factor name.
double FactorValue(const FactorVector& f, std::string_view name);

// Extremes of arg1 + arg2 word counts over the analyzed corpus.
struct LengthRange {
  int min_words = 0;
  int max_words = 0;
};

LengthRange WordCountRange(std::span<const corpus::DiscourseExample> examples);

// The example's own conn_syntax wins when known; otherwise the inventory
// decides (unknown connectives fall back to adverb, unambiguous). Unknown
// argument status maps to inter-sentential. A degenerate range gives
// norm_length 0.
FactorVector ExtractFactors(const corpus::DiscourseExample& example,
                            const corpus::ConnectiveInventory& inventory,
                            const LengthRange& range);

struct FactorTable {
  std::vector<std::string> ids;
  std::vector<FactorVector> factors;
  std::vector<double> scores;
  LengthRange range;

  std::size_t size() const { return ids.size(); }
  std::vector<double> Column(std::string_view name) const;
};

// Explicit examples of `corpus` with their shift scores (parallel to the
// corpus). Throws DataError on a size mismatch or a missing connective.
FactorTable BuildFactorTable(const corpus::Corpus& corpus,
                             std::span<const double> scores,
                             const corpus::ConnectiveInventory& inventory);

// Columns: example_id, conj_vs_adv, ambiguous, intra_vs_inter,
// norm_length, shift_score.
void WriteFactorTable(const std::filesystem::path& path, const FactorTable& table);
FactorTable ReadFactorTable(const std::filesystem::path& path);

struct Correlation {
  double r = 0.0;
  double p_value = 1.0;
};

// Product-moment correlation with a two-tailed t-test p-value (n - 2
// degrees of freedom). Throws UsageError when |x| != |y| or n < 3 and
// UndefinedError when either side has zero variance.
Correlation Pearson(std::span<const double> x, std::span<const double> y);

struct GbdtConfig {
  int num_trees = 100;
  int max_depth = 4;
  double learning_rate = 0.1;
  double lambda = 1.0;  // L2 penalty on leaf weights
  int min_samples_leaf = 1;
  std::uint64_t seed = 0;
};

// Squared-error gradient-boosted regression trees on the selected factors;
// returns each feature's average split gain normalized to sum to 1.
// Constant features get 0 with a warning. Throws UsageError for fewer than
// two features, unknown names or misaligned targets, and UndefinedError
// when every selected feature is constant.
std::map<std::string, double> GbdtImportance(
    std::span<const FactorVector> features, std::span<const double> targets,
    std::span<const std::string> feature_subset, const GbdtConfig& config = {});

// Generic form over a row-major n x k feature matrix.
std::vector<double> GbdtImportance(const std::vector<std::vector<double>>& rows,
                                   std::span<const double> targets,
                                   const GbdtConfig& config = {});

// Correlations for every factor and importances for each subset.
nlohmann::json AnalysisReport(const FactorTable& table,
                              const std::vector<std::vector<std::string>>& subsets,
                              const GbdtConfig& config = {});

}  // namespace connshift::factors

#endif  // CONNSHIFT_FACTORS_FACTORS_H_
