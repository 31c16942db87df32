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

#ifndef CONNSHIFT_CORPUS_INVENTORY_H_
#define CONNSHIFT_CORPUS_INVENTORY_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "connshift/corpus/types.h"

namespace connshift::corpus {

struct ConnectiveEntry {
  std::string surface;  // lower case, single-space separated
  ConnSyntax syntax = ConnSyntax::kAdverb;
  std::vector<std::string> signalable_relations;

  bool ambiguous() const { return signalable_relations.size() > 1; }
};

// Lower-cases ASCII and collapses whitespace runs to single spaces.
std::string NormalizeSurface(std::string_view surface);

class ConnectiveInventory {
 public:
  ConnectiveInventory() = default;
  // Throws DataError on duplicate surfaces.
  explicit ConnectiveInventory(std::vector<ConnectiveEntry> entries);

  // The shipped PDTB 2.0 explicit connective list, compiled into the
  // library from data/pdtb2_connectives.tsv.
  static const ConnectiveInventory& Default();
  // Format: "surface<TAB>syntax<TAB>rel1,rel2,..." with '#' comments and
  // an optional header row.
  static ConnectiveInventory Parse(std::string_view tsv);
  static ConnectiveInventory Load(const std::filesystem::path& path);

  std::span<const ConnectiveEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  const ConnectiveEntry* Find(std::string_view surface) const;

  // Entry for `surface`; unknown connectives get {adverb, unambiguous} and
  // a logged warning.
  ConnectiveEntry Lookup(std::string_view surface) const;

  struct Match {
    std::string surface;
    // Number of leading tokens consumed, including skipped punctuation and
    // any punctuation glued to the last connective word.
    std::size_t tokens_consumed = 0;
  };
  // Longest inventory surface that starts `tokens` at a word boundary,
  // case-insensitive. Leading punctuation-only tokens are skipped and
  // punctuation attached to a word ("however,") is ignored.
  std::optional<Match> MatchPrefix(std::span<const std::string> tokens) const;

 private:
  std::vector<ConnectiveEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_surface_;
  std::size_t max_words_ = 0;
};

}  // namespace connshift::corpus

#endif  // CONNSHIFT_CORPUS_INVENTORY_H_
