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


#ifndef CONNSHIFT_ENCODER_METRICS_H_
#define CONNSHIFT_ENCODER_METRICS_H_

#include <map>
#include <span>
#include <string>
#include <string_view>

#include "connshift/corpus/types.h"

namespace connshift::encoder {

// Which labels enter the macro-F1 mean.
enum class F1Average {
  kPresent,      // labels seen in gold or prediction
  kGoldPresent,  // labels seen in gold
  kAllLabels,    // every scheme label; unseen labels contribute 0
};

std::string_view ToString(F1Average a);
F1Average F1AverageFromString(std::string_view s);  // throws ConfigError

struct Metrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  // F1 of every scheme label, including ones left out of the mean.
  std::map<std::string, double> per_label_f1;
};

// gold and predicted hold label indices into `scheme`. Throws UsageError on
// length mismatch or empty input.
Metrics ComputeMetrics(std::span<const int> gold, std::span<const int> predicted,
                       const corpus::LabelScheme& scheme,
                       F1Average average = F1Average::kPresent);

}  // namespace connshift::encoder

#endif  // CONNSHIFT_ENCODER_METRICS_H_
