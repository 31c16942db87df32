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


// Label-shift case categorization from re-annotations made without the
// connective, and Cohen's kappa between two annotators.

#ifndef CONNSHIFT_AUDIT_AUDIT_H_
#define CONNSHIFT_AUDIT_AUDIT_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace connshift::audit {

inline constexpr std::string_view kNoRel = "NoRel";

// One re-annotated example. `new_labels` holds the label set assigned
// without the connective, or exactly {"NoRel"}.
struct AnnotationPair {
  std::string id;
  std::vector<std::string> new_labels;
  std::string original;

  bool no_rel() const { return new_labels.size() == 1 && new_labels[0] == kNoRel; }
  // The first-listed new label (NoRel included).
  const std::string& primary() const { return new_labels.front(); }
};

// Throws DataError if the new annotation is empty, NoRel is combined with
// other labels, or the original label is empty or NoRel.
void Validate(const AnnotationPair& pair);

// Parses "a;b" or "NoRel"; duplicates are dropped, order kept.
AnnotationPair MakePair(std::string id, std::string_view new_field,
                        std::string original);

enum class ShiftCase { kNone, kCase1, kCase2, kCase3 };

std::string_view ToString(ShiftCase c);

// kNone iff the new set equals {original}; otherwise case 2 when the
// original is among the new labels, case 3 for NoRel, else case 1.
ShiftCase Categorize(const AnnotationPair& pair);

struct ShiftCounts {
  int pairs = 0;
  int shift_num = 0;
  int case1 = 0;
  int case2 = 0;
  int case3 = 0;

  friend bool operator==(const ShiftCounts&, const ShiftCounts&) = default;
};

ShiftCounts CategorizeShifts(std::span<const AnnotationPair> pairs);

// (p_o - p_e) / (1 - p_e) with chance agreement from the marginals. When
// p_e = 1 both annotators used one identical label throughout; returns 1.0
// and logs a warning. Throws UsageError on empty or unequal inputs.
double CohenKappa(std::span<const std::string> a, std::span<const std::string> b);

// TSV with header: example_id, new_labels (semicolon-joined or NoRel),
// original_label.
std::vector<AnnotationPair> ReadAnnotations(const std::filesystem::path& path);
void WriteAnnotations(const std::filesystem::path& path,
                      std::span<const AnnotationPair> pairs);

// Counts, per-example cases and, when a second annotator is given (matched
// by example id), kappa over primary labels.
nlohmann::json AuditReport(std::span<const AnnotationPair> pairs,
                           std::span<const AnnotationPair> second = {});

}  // namespace connshift::audit

#endif  // CONNSHIFT_AUDIT_AUDIT_H_
