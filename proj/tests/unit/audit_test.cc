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


#include <doctest.h>

#include <filesystem>

#include "connshift/audit/audit.h"
#include "connshift/error.h"

namespace connshift::audit {
namespace {

TEST_CASE("categorization of single pairs") {
  CHECK(Categorize(MakePair("1", "Expansion", "Expansion")) == ShiftCase::kNone);
  CHECK(Categorize(MakePair("2", "Temporal", "Expansion")) == ShiftCase::kCase1);
  CHECK(Categorize(MakePair("3", "Temporal;Expansion", "Expansion")) == ShiftCase::kCase2);
  CHECK(Categorize(MakePair("4", "Expansion;Temporal", "Expansion")) == ShiftCase::kCase2);
  CHECK(Categorize(MakePair("5", "NoRel", "Expansion")) == ShiftCase::kCase3);
  CHECK(Categorize(MakePair("6", "Temporal;Comparison", "Expansion")) == ShiftCase::kCase1);
}

TEST_CASE("MakePair trims and deduplicates") {
  const AnnotationPair p = MakePair("x", " Temporal ; Temporal;;Contingency ", " Temporal");
  CHECK(p.new_labels == std::vector<std::string>{"Temporal", "Contingency"});
  CHECK(p.original == "Temporal");
  CHECK(p.primary() == "Temporal");
  CHECK(Categorize(MakePair("y", "Temporal;Temporal", "Temporal")) == ShiftCase::kNone);
}

TEST_CASE("invalid annotations are rejected") {
  CHECK_THROWS_AS(MakePair("1", "", "Expansion"), DataError);
  CHECK_THROWS_AS(MakePair("2", "NoRel;Expansion", "Expansion"), DataError);
  CHECK_THROWS_AS(MakePair("3", "Expansion", "NoRel"), DataError);
  CHECK_THROWS_AS(MakePair("4", "Expansion", ""), DataError);
}

TEST_CASE("counts add up") {
  std::vector<AnnotationPair> pairs = {
      MakePair("a", "A", "A"), MakePair("b", "B", "A"), MakePair("c", "A;B", "A"),
      MakePair("d", "NoRel", "B"), MakePair("e", "B", "B")};
  const ShiftCounts c = CategorizeShifts(pairs);
  CHECK(c == ShiftCounts{5, 3, 1, 1, 1});
  CHECK(c.case1 + c.case2 + c.case3 == c.shift_num);
}

TEST_CASE("Cohen's kappa on a hand-computed case") {
  // p_o = 3/5, p_e = (2*2 + 3*3)/25 = 13/25, kappa = (2/25)/(12/25) = 1/6.
  const std::vector<std::string> a = {"x", "x", "y", "y", "y"};
  const std::vector<std::string> b = {"x", "y", "y", "y", "x"};
  CHECK(CohenKappa(a, b) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(CohenKappa(a, b) == doctest::Approx(CohenKappa(b, a)));
  const std::vector<std::string> same = {"z", "z"};
  CHECK(CohenKappa(same, same) == 1.0);
  const std::vector<std::string> flip = {"x", "y"}, flop = {"y", "x"};
  CHECK(CohenKappa(flip, flop) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(CohenKappa(a, flip), UsageError);
}

TEST_CASE("annotation files round-trip and feed the report") {
  const auto dir = std::filesystem::temp_directory_path() / "connshift_audit_test";
  std::filesystem::create_directories(dir);
  const std::vector<AnnotationPair> pairs = {MakePair("a", "A", "A"), MakePair("b", "B;A", "A"),
                                             MakePair("c", "NoRel", "B")};
  WriteAnnotations(dir / "one.tsv", pairs);
  const auto back = ReadAnnotations(dir / "one.tsv");
  REQUIRE(back.size() == 3);
  CHECK(back[1].new_labels == pairs[1].new_labels);
  const auto report = AuditReport(back, back);
  CHECK(report["shift_num"] == 2);
  CHECK(report["case2"] == 1);
  CHECK(report["kappa"].get<double>() == 1.0);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace connshift::audit
