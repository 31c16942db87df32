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

#ifndef CONNSHIFT_CORPUS_TRANSFORMS_H_
#define CONNSHIFT_CORPUS_TRANSFORMS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "connshift/corpus/inventory.h"
#include "connshift/corpus/types.h"

namespace connshift::corpus {

struct ModalitySplit {
  Corpus explicit_corpus;
  Corpus implicit_corpus;
};

// Splits unit-pair relations into explicit and implicit examples. An
// example is explicit iff its units are adjacent and unit2 starts with an
// inventory connective (longest match, case-insensitive, tolerant of
// punctuation at the boundary). The matched words are moved from arg2
// into `connective`, along with punctuation that directly follows them;
// if nothing would remain of arg2 the example stays implicit.
//
// Both corpora share a scheme holding every observed label, sorted.
ModalitySplit SplitByLeadingConnective(
    std::span<const DiscourseExample> examples,
    const ConnectiveInventory& inventory);

// Keeps the labels whose frequency in the train split of `reference`
// exceeds `min_count`, applied to both corpora. min_count == 0 is a no-op.
ModalitySplit FilterMinFrequency(const ModalitySplit& corpora,
                                 int min_count = 100);

// Single-corpus variant: the corpus is its own frequency reference.
Corpus FilterMinFrequency(const Corpus& corpus, int min_count = 100);

// Drops examples whose label is not in `scheme` and rebinds the corpus.
Corpus RestrictToScheme(const Corpus& corpus, const LabelScheme& scheme);

// Per split, per label counts. Labels with zero count are omitted.
struct CountTable {
  std::map<Split, std::map<std::string, int>> counts;

  int Total(Split split) const;
  int Total() const;
  bool empty() const { return counts.empty(); }
};

CountTable CorpusStats(const Corpus& corpus);

}  // namespace connshift::corpus

#endif  // CONNSHIFT_CORPUS_TRANSFORMS_H_
