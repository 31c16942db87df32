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

// Core data model: discourse relation examples, label schemes and corpora.

#ifndef CONNSHIFT_CORPUS_TYPES_H_
#define CONNSHIFT_CORPUS_TYPES_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace connshift::corpus {

enum class Modality { kExplicit, kImplicit };
enum class ConnSyntax { kConjunction, kAdverb, kUnknown };
enum class ArgStatus { kIntraSentential, kInterSentential, kUnknown };
enum class Split { kTrain, kDev, kTest };
enum class SchemeLevel { kTop, kSecond };

std::string_view ToString(Modality m);
std::string_view ToString(ConnSyntax s);
std::string_view ToString(ArgStatus s);
std::string_view ToString(Split s);
std::string_view ToString(SchemeLevel l);

// The From* parsers throw DataError on unrecognized names.
Modality ModalityFromString(std::string_view s);
ConnSyntax ConnSyntaxFromString(std::string_view s);
ArgStatus ArgStatusFromString(std::string_view s);
Split SplitFromString(std::string_view s);
SchemeLevel SchemeLevelFromString(std::string_view s);

inline constexpr Split kAllSplits[] = {Split::kTrain, Split::kDev,
                                       Split::kTest};

using Tokens = std::vector<std::string>;

// Splits on runs of ASCII whitespace.
Tokens Tokenize(std::string_view text);
std::string Join(const Tokens& tokens);

// One relation instance Rel(Arg1, Conn, Arg2).
struct DiscourseExample {
  std::string id;
  Tokens arg1;
  Tokens arg2;
  // Absent for implicit examples without an annotated connective. An
  // explicit example always carries a non-empty connective.
  std::optional<std::string> connective;
  std::string relation_top;
  std::optional<std::string> relation_second;
  Modality modality = Modality::kImplicit;
  ConnSyntax conn_syntax = ConnSyntax::kUnknown;
  ArgStatus arg_status = ArgStatus::kUnknown;
  Split split = Split::kTrain;

  // Loader metadata, not part of the interchange format.
  bool units_adjacent = false;
  // Set when the loader made a lossy choice (first of several senses,
  // label outside the known scheme).
  bool flagged = false;

  friend bool operator==(const DiscourseExample&,
                         const DiscourseExample&) = default;
};

class LabelScheme {
 public:
  LabelScheme() = default;
  // Throws DataError if labels repeat or parent_map is not total over the
  // labels of a second-level scheme.
  LabelScheme(std::string name, SchemeLevel level,
              std::vector<std::string> labels,
              std::map<std::string, std::string> parent_map = {});

  static LabelScheme Pdtb2Top();
  static LabelScheme Pdtb2Second();
  static LabelScheme Pdtb3Top();
  static LabelScheme Pdtb3Second();
  // The seven relations that survive frequency filtering on GUM v9.
  static LabelScheme Gum();
  // Looks up one of the built-in schemes by name ("pdtb2-top", ...).
  static LabelScheme Named(std::string_view name);

  const std::string& name() const { return name_; }
  SchemeLevel level() const { return level_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::map<std::string, std::string>& parent_map() const {
    return parent_map_;
  }
  int size() const { return static_cast<int>(labels_.size()); }

  std::optional<int> IndexOf(std::string_view label) const;
  bool Contains(std::string_view label) const {
    return IndexOf(label).has_value();
  }
  // Top-level parent of a second-level label.
  std::optional<std::string> ParentOf(std::string_view label) const;

  // The label an example is classified under in this scheme, or nullopt if
  // the example does not fit.
  std::optional<std::string> ActiveLabel(const DiscourseExample& e) const;
  // Nullopt when valid; otherwise a human-readable reason.
  std::optional<std::string> Validate(const DiscourseExample& e) const;

  // Stable 64-bit FNV-1a hash of the scheme definition.
  std::uint64_t Fingerprint() const;

  // Same name/level/parents restricted to `keep`, preserving order.
  LabelScheme Restrict(std::span<const std::string> keep) const;

  friend bool operator==(const LabelScheme&, const LabelScheme&) = default;

 private:
  std::string name_;
  SchemeLevel level_ = SchemeLevel::kTop;
  std::vector<std::string> labels_;
  std::map<std::string, std::string> parent_map_;
};

// An immutable, validated collection of examples under one scheme.
class Corpus {
 public:
  Corpus() = default;
  // Throws DataError naming the first invalid example.
  Corpus(LabelScheme scheme, std::vector<DiscourseExample> examples);

  const LabelScheme& scheme() const { return scheme_; }
  std::span<const DiscourseExample> examples() const { return *examples_; }
  std::size_t size() const { return examples_->size(); }
  bool empty() const { return examples_->empty(); }
  const DiscourseExample& operator[](std::size_t i) const {
    return (*examples_)[i];
  }

  // Index of the example's active label in the scheme.
  int LabelIndex(const DiscourseExample& e) const;
  const std::string& LabelOf(const DiscourseExample& e) const;

  Corpus Subset(Split split) const;
  // Keeps examples whose indices are listed, in the given order.
  Corpus Select(std::span<const std::size_t> indices) const;

 private:
  LabelScheme scheme_;
  std::shared_ptr<const std::vector<DiscourseExample>> examples_ =
      std::make_shared<const std::vector<DiscourseExample>>();
};

}  // namespace connshift::corpus

#endif  // CONNSHIFT_CORPUS_TYPES_H_
