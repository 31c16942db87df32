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

#include "connshift/corpus/types.h"

#include <algorithm>
#include <set>
#include <utility>

#include "connshift/error.h"
#include "connshift/hash.h"

namespace connshift::corpus {
namespace {

template <typename E, std::size_t N>
E ParseEnum(std::string_view s, const std::pair<std::string_view, E> (&table)[N],
            std::string_view what) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  throw DataError("unknown " + std::string(what) + " '" + std::string(s) +
                  "'");
}

constexpr std::pair<std::string_view, Modality> kModalities[] = {
    {"explicit", Modality::kExplicit}, {"implicit", Modality::kImplicit}};
constexpr std::pair<std::string_view, ConnSyntax> kSyntaxes[] = {
    {"conjunction", ConnSyntax::kConjunction},
    {"adverb", ConnSyntax::kAdverb},
    {"unknown", ConnSyntax::kUnknown}};
constexpr std::pair<std::string_view, ArgStatus> kStatuses[] = {
    {"intra_sentential", ArgStatus::kIntraSentential},
    {"inter_sentential", ArgStatus::kInterSentential},
    {"unknown", ArgStatus::kUnknown}};
constexpr std::pair<std::string_view, Split> kSplits[] = {
    {"train", Split::kTrain}, {"dev", Split::kDev}, {"test", Split::kTest}};
constexpr std::pair<std::string_view, SchemeLevel> kLevels[] = {
    {"top", SchemeLevel::kTop}, {"second", SchemeLevel::kSecond}};

template <typename E, std::size_t N>
std::string_view EnumName(E value,
                          const std::pair<std::string_view, E> (&table)[N]) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "unknown";
}

const std::vector<std::string> kTopPdtb = {"Comparison", "Contingency",
                                           "Expansion", "Temporal"};

std::map<std::string, std::string> ParentsFromPrefix(
    const std::vector<std::string>& labels) {
  std::map<std::string, std::string> parents;
  for (const auto& l : labels) parents[l] = l.substr(0, l.find('.'));
  return parents;
}

}  // namespace

std::string_view ToString(Modality m) { return EnumName(m, kModalities); }
std::string_view ToString(ConnSyntax s) { return EnumName(s, kSyntaxes); }
std::string_view ToString(ArgStatus s) { return EnumName(s, kStatuses); }
std::string_view ToString(Split s) { return EnumName(s, kSplits); }
std::string_view ToString(SchemeLevel l) { return EnumName(l, kLevels); }

Modality ModalityFromString(std::string_view s) {
  return ParseEnum(s, kModalities, "modality");
}
ConnSyntax ConnSyntaxFromString(std::string_view s) {
  return ParseEnum(s, kSyntaxes, "connective syntax");
}
ArgStatus ArgStatusFromString(std::string_view s) {
  return ParseEnum(s, kStatuses, "argument status");
}
Split SplitFromString(std::string_view s) {
  return ParseEnum(s, kSplits, "split");
}
SchemeLevel SchemeLevelFromString(std::string_view s) {
  return ParseEnum(s, kLevels, "scheme level");
}

Tokens Tokenize(std::string_view text) {
  Tokens out;
  std::size_t i = 0;
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string Join(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

LabelScheme::LabelScheme(std::string name, SchemeLevel level,
                         std::vector<std::string> labels,
                         std::map<std::string, std::string> parent_map)
    : name_(std::move(name)),
      level_(level),
      labels_(std::move(labels)),
      parent_map_(std::move(parent_map)) {
  std::set<std::string_view> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) {
      throw DataError("label scheme '" + name_ + "' repeats label '" + l +
                      "'");
    }
    if (level_ == SchemeLevel::kSecond && !parent_map_.contains(l)) {
      throw DataError("label scheme '" + name_ + "' has no parent for '" + l +
                      "'");
    }
  }
}

LabelScheme LabelScheme::Pdtb2Top() {
  return LabelScheme("pdtb2-top", SchemeLevel::kTop, kTopPdtb);
}

LabelScheme LabelScheme::Pdtb2Second() {
  std::vector<std::string> labels = {
      "Comparison.Concession",   "Comparison.Contrast",
      "Contingency.Cause",       "Contingency.Pragmatic cause",
      "Expansion.Alternative",   "Expansion.Conjunction",
      "Expansion.Instantiation", "Expansion.List",
      "Expansion.Restatement",   "Temporal.Asynchronous",
      "Temporal.Synchrony"};
  auto parents = ParentsFromPrefix(labels);
  return LabelScheme("pdtb2-second", SchemeLevel::kSecond, std::move(labels),
                     std::move(parents));
}

LabelScheme LabelScheme::Pdtb3Top() {
  return LabelScheme("pdtb3-top", SchemeLevel::kTop, kTopPdtb);
}

LabelScheme LabelScheme::Pdtb3Second() {
  std::vector<std::string> labels = {
      "Comparison.Concession",   "Comparison.Contrast",
      "Contingency.Cause",       "Contingency.Cause+Belief",
      "Contingency.Condition",   "Contingency.Purpose",
      "Expansion.Conjunction",   "Expansion.Equivalence",
      "Expansion.Instantiation", "Expansion.Level-of-detail",
      "Expansion.Manner",        "Expansion.Substitution",
      "Temporal.Asynchronous",   "Temporal.Synchronous"};
  auto parents = ParentsFromPrefix(labels);
  return LabelScheme("pdtb3-second", SchemeLevel::kSecond, std::move(labels),
                     std::move(parents));
}

LabelScheme LabelScheme::Gum() {
  // DISRPT distributes GUM labels in lower case.
  return LabelScheme("gum", SchemeLevel::kTop,
                     {"joint", "adversative", "context", "causal",
                      "elaboration", "explanation", "contingency"});
}

LabelScheme LabelScheme::Named(std::string_view name) {
  if (name == "pdtb2-top") return Pdtb2Top();
  if (name == "pdtb2-second") return Pdtb2Second();
  if (name == "pdtb3-top") return Pdtb3Top();
  if (name == "pdtb3-second") return Pdtb3Second();
  if (name == "gum") return Gum();
  throw ConfigError("unknown label scheme '" + std::string(name) + "'");
}

std::optional<int> LabelScheme::IndexOf(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<int>(it - labels_.begin());
}

std::optional<std::string> LabelScheme::ParentOf(std::string_view label) const {
  auto it = parent_map_.find(std::string(label));
  if (it == parent_map_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> LabelScheme::ActiveLabel(
    const DiscourseExample& e) const {
  if (level_ == SchemeLevel::kTop) {
    if (Contains(e.relation_top)) return e.relation_top;
    return std::nullopt;
  }
  if (e.relation_second && Contains(*e.relation_second)) {
    return e.relation_second;
  }
  return std::nullopt;
}

std::optional<std::string> LabelScheme::Validate(
    const DiscourseExample& e) const {
  if (e.arg1.empty()) return "arg1 is empty";
  if (e.arg2.empty()) return "arg2 is empty";
  if (e.modality == Modality::kExplicit &&
      (!e.connective || e.connective->empty())) {
    return "explicit example without connective";
  }
  if (level_ == SchemeLevel::kTop) {
    if (!Contains(e.relation_top)) {
      return "label '" + e.relation_top + "' not in scheme " + name_;
    }
    return std::nullopt;
  }
  if (!e.relation_second) return "missing second-level label";
  if (!Contains(*e.relation_second)) {
    return "label '" + *e.relation_second + "' not in scheme " + name_;
  }
  if (ParentOf(*e.relation_second) != e.relation_top) {
    return "second-level label '" + *e.relation_second +
           "' is not a child of '" + e.relation_top + "'";
  }
  return std::nullopt;
}

std::uint64_t LabelScheme::Fingerprint() const {
  Fnv1a64 h;
  h.Field(name_).Field(ToString(level_));
  for (const auto& l : labels_) h.Field(l);
  return h.digest();
}

LabelScheme LabelScheme::Restrict(std::span<const std::string> keep) const {
  std::vector<std::string> labels;
  std::map<std::string, std::string> parents;
  for (const auto& l : labels_) {
    if (std::find(keep.begin(), keep.end(), l) == keep.end()) continue;
    labels.push_back(l);
    if (auto p = ParentOf(l)) parents[l] = *p;
  }
  return LabelScheme(name_, level_, std::move(labels), std::move(parents));
}

Corpus::Corpus(LabelScheme scheme, std::vector<DiscourseExample> examples)
    : scheme_(std::move(scheme)) {
  for (const auto& e : examples) {
    if (auto why = scheme_.Validate(e)) {
      throw DataError("invalid example '" + e.id + "': " + *why);
    }
  }
  examples_ =
      std::make_shared<const std::vector<DiscourseExample>>(std::move(examples));
}

int Corpus::LabelIndex(const DiscourseExample& e) const {
  auto label = scheme_.ActiveLabel(e);
  if (!label) throw DataError("example '" + e.id + "' has no label in scheme");
  return *scheme_.IndexOf(*label);
}

const std::string& Corpus::LabelOf(const DiscourseExample& e) const {
  return scheme_.labels()[LabelIndex(e)];
}

Corpus Corpus::Subset(Split split) const {
  std::vector<DiscourseExample> out;
  for (const auto& e : *examples_) {
    if (e.split == split) out.push_back(e);
  }
  return Corpus(scheme_, std::move(out));
}

Corpus Corpus::Select(std::span<const std::size_t> indices) const {
  std::vector<DiscourseExample> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(examples_->at(i));
  return Corpus(scheme_, std::move(out));
}

}  // namespace connshift::corpus
