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

#include "connshift/corpus/transforms.h"

#include <algorithm>
#include <cctype>
#include <set>

namespace connshift::corpus {
namespace {

bool PunctOnly(const std::string& token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  });
}

}  // namespace

ModalitySplit SplitByLeadingConnective(
    std::span<const DiscourseExample> examples,
    const ConnectiveInventory& inventory) {
  std::set<std::string> labels;
  std::vector<DiscourseExample> explicit_examples, implicit_examples;
  for (const auto& in : examples) {
    labels.insert(in.relation_top);
    DiscourseExample e = in;
    // Already split: pass through so that splitting is idempotent.
    if (e.modality == Modality::kExplicit && e.connective &&
        !e.connective->empty()) {
      explicit_examples.push_back(std::move(e));
      continue;
    }
    std::optional<ConnectiveInventory::Match> match;
    if (e.units_adjacent) match = inventory.MatchPrefix(e.arg2);
    std::size_t cut = match ? match->tokens_consumed : 0;
    while (match && cut < e.arg2.size() && PunctOnly(e.arg2[cut])) ++cut;
    if (!match || cut >= e.arg2.size()) {
      e.modality = Modality::kImplicit;
      e.connective.reset();
      implicit_examples.push_back(std::move(e));
      continue;
    }
    e.modality = Modality::kExplicit;
    e.connective = match->surface;
    e.conn_syntax = inventory.Find(match->surface)->syntax;
    e.arg2.erase(e.arg2.begin(), e.arg2.begin() + cut);
    explicit_examples.push_back(std::move(e));
  }
  LabelScheme scheme("gum-observed", SchemeLevel::kTop,
                     std::vector<std::string>(labels.begin(), labels.end()));
  return {Corpus(scheme, std::move(explicit_examples)),
          Corpus(scheme, std::move(implicit_examples))};
}

namespace {

std::vector<std::string> FrequentLabels(const Corpus& reference,
                                        int min_count) {
  std::map<std::string, int> freq;
  for (const auto& e : reference.examples()) {
    if (e.split == Split::kTrain) ++freq[reference.LabelOf(e)];
  }
  std::vector<std::string> keep;
  for (const auto& label : reference.scheme().labels()) {
    if (freq[label] > min_count) keep.push_back(label);
  }
  return keep;
}

}  // namespace

Corpus RestrictToScheme(const Corpus& corpus, const LabelScheme& scheme) {
  std::vector<DiscourseExample> kept;
  for (const auto& e : corpus.examples()) {
    if (!scheme.Validate(e)) kept.push_back(e);
  }
  return Corpus(scheme, std::move(kept));
}

ModalitySplit FilterMinFrequency(const ModalitySplit& corpora,
                                 int min_count) {
  if (min_count <= 0) return corpora;
  auto keep = FrequentLabels(corpora.explicit_corpus, min_count);
  LabelScheme scheme = corpora.explicit_corpus.scheme().Restrict(keep);
  return {RestrictToScheme(corpora.explicit_corpus, scheme),
          RestrictToScheme(corpora.implicit_corpus, scheme)};
}

Corpus FilterMinFrequency(const Corpus& corpus, int min_count) {
  if (min_count <= 0) return corpus;
  auto keep = FrequentLabels(corpus, min_count);
  return RestrictToScheme(corpus, corpus.scheme().Restrict(keep));
}

int CountTable::Total(Split split) const {
  auto it = counts.find(split);
  if (it == counts.end()) return 0;
  int total = 0;
  for (const auto& [label, n] : it->second) total += n;
  return total;
}

int CountTable::Total() const {
  int total = 0;
  for (Split s : kAllSplits) total += Total(s);
  return total;
}

CountTable CorpusStats(const Corpus& corpus) {
  CountTable table;
  for (const auto& e : corpus.examples()) {
    ++table.counts[e.split][corpus.LabelOf(e)];
  }
  return table;
}

}  // namespace connshift::corpus
