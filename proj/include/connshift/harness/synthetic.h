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


// Synthetic corpora with a known amount of connective-induced label shift.
//
// Every label owns a set of cue words. An example's arguments contain
// filler words plus one cue word of its argument label; its connective is
// built from cue words of its connective label. A planted shift is an
// explicit example whose connective label differs from its argument label.
// Explicit examples are annotated with the connective label, implicit ones
// with the argument label, and implicit connectives always agree with the
// arguments.

#ifndef CONNSHIFT_HARNESS_SYNTHETIC_H_
#define CONNSHIFT_HARNESS_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "connshift/corpus/types.h"

namespace connshift::harness {

struct SyntheticLabel {
  std::string name;
  // Share of explicit examples annotated with this label.
  double weight = 1.0;
  // Fraction of this label's explicit examples whose arguments express
  // `shift_target` instead.
  double shift_rate = 0.0;
  int shift_target = 0;
};

struct SyntheticOptions {
  std::vector<SyntheticLabel> labels;
  int cues_per_label = 6;
  int connectives_per_label = 3;
  int connective_length = 4;
  int filler_words = 80;
  int min_arg_words = 4;
  int max_arg_words = 8;
  int explicit_train = 1600;
  int explicit_dev = 200;
  int explicit_test = 200;
  int implicit_train = 1600;
  int implicit_dev = 400;
  int implicit_test = 1000;
  // Shift rate planted in implicit examples (0 = connectives redundant).
  double implicit_shift_rate = 0.0;
  std::uint64_t seed = 7;

  // Four equally frequent labels, each shifting 30% of its explicit
  // examples to the next label in a cycle (planted rate 0.3).
  static SyntheticOptions Default();
  // Overall planted rate implied by the label weights and shift rates.
  double PlantedShiftRate() const;
};

struct SyntheticCorpus {
  corpus::LabelScheme scheme;
  std::vector<corpus::DiscourseExample> explicit_examples;
  std::vector<corpus::DiscourseExample> implicit_examples;
  // Parallel to the example vectors.
  std::vector<std::string> explicit_argument_labels;
  std::vector<bool> explicit_shifted;
  std::vector<std::string> implicit_argument_labels;
  std::vector<bool> implicit_shifted;

  corpus::Corpus ExplicitCorpus() const;
  corpus::Corpus ImplicitCorpus() const;
  // Explicit examples relabelled with their argument label.
  corpus::Corpus ExplicitByArguments() const;
  corpus::Corpus ImplicitByArguments() const;
};

// Throws ConfigError on inconsistent options.
SyntheticCorpus GenerateSynthetic(const SyntheticOptions& options);

}  // namespace connshift::harness

#endif  // CONNSHIFT_HARNESS_SYNTHETIC_H_
