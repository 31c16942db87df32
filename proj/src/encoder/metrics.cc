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


#include "connshift/encoder/metrics.h"

#include <vector>

#include "connshift/error.h"

namespace connshift::encoder {

std::string_view ToString(F1Average a) {
  switch (a) {
    case F1Average::kPresent: return "present";
    case F1Average::kGoldPresent: return "gold-present";
    case F1Average::kAllLabels: return "all";
  }
  return "present";
}

F1Average F1AverageFromString(std::string_view s) {
  if (s == "present") return F1Average::kPresent;
  if (s == "gold-present") return F1Average::kGoldPresent;
  if (s == "all") return F1Average::kAllLabels;
  throw ConfigError("unknown f1 averaging '" + std::string(s) +
                    "' (expected present, gold-present or all)");
}

Metrics ComputeMetrics(std::span<const int> gold, std::span<const int> predicted,
                       const corpus::LabelScheme& scheme, F1Average average) {
  if (gold.size() != predicted.size()) {
    throw UsageError("gold and predicted lengths differ");
  }
  if (gold.empty()) throw UsageError("cannot evaluate an empty corpus");
  const int k = scheme.size();
  std::vector<long> tp(k, 0), gold_n(k, 0), pred_n(k, 0);
  long correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int g = gold[i], p = predicted[i];
    if (g < 0 || g >= k || p < 0 || p >= k) {
      throw UsageError("label index out of range");
    }
    ++gold_n[g];
    ++pred_n[p];
    if (g == p) {
      ++tp[g];
      ++correct;
    }
  }
  Metrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
  double sum = 0.0;
  int counted = 0;
  for (int c = 0; c < k; ++c) {
    const long denom = gold_n[c] + pred_n[c];
    const double f1 = denom == 0 ? 0.0 : 2.0 * tp[c] / static_cast<double>(denom);
    m.per_label_f1[scheme.labels()[c]] = f1;
    bool include = true;
    if (average == F1Average::kPresent) include = denom > 0;
    if (average == F1Average::kGoldPresent) include = gold_n[c] > 0;
    if (include) {
      sum += f1;
      ++counted;
    }
  }
  m.macro_f1 = counted == 0 ? 0.0 : sum / counted;
  return m;
}

}  // namespace connshift::encoder
