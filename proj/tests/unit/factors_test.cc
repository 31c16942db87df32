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

#include <cmath>
#include <filesystem>
#include <numbers>

#include "connshift/error.h"
#include "connshift/factors/factors.h"
#include "connshift/nn/rng.h"

namespace connshift::factors {
namespace {

// Two-sided p-value of Student's t by Simpson integration of the density.
double OracleTwoSidedP(double t, int df) {
  const double nu = df;
  const double c = std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) /
                   std::sqrt(nu * std::numbers::pi);
  auto f = [&](double x) { return c * std::pow(1 + x * x / nu, -(nu + 1) / 2); };
  const int steps = 20000;
  const double h = std::abs(t) / steps;
  double s = f(0) + f(std::abs(t));
  for (int i = 1; i < steps; ++i) s += (i % 2 ? 4 : 2) * f(i * h);
  return 1.0 - 2.0 * s * h / 3.0;
}

TEST_CASE("Pearson p-value agrees with numeric integration") {
  const std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<double> y = {2, 1, 4, 3, 7, 5, 6, 10, 8, 9};
  const Correlation c = Pearson(x, y);
  const double t = c.r * std::sqrt(8.0 / (1 - c.r * c.r));
  CHECK(c.p_value == doctest::Approx(OracleTwoSidedP(t, 8)).epsilon(1e-8));
  CHECK(c.r > 0.8);
  // Frozen; cross-checked against numpy.corrcoef.
  CHECK(c.r == doctest::Approx(0.9030303030303030).epsilon(1e-12));
}

TEST_CASE("Pearson edge cases") {
  const std::vector<double> a = {1, 2, 3}, flat = {5, 5, 5}, shortv = {1, 2};
  CHECK(Pearson(a, a).p_value == 0.0);
  CHECK_THROWS_AS(Pearson(a, flat), UndefinedError);
  CHECK_THROWS_AS(Pearson(shortv, shortv), UsageError);
  CHECK_THROWS_AS(Pearson(a, shortv), UsageError);
}

TEST_CASE("Pearson is symmetric and invariant to affine maps") {
  nn::Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x, y, z;
    for (int i = 0; i < 20; ++i) {
      x.push_back(rng.Normal(0, 1));
      y.push_back(x.back() + rng.Normal(0, 1));
      z.push_back(3.0 * y.back() - 7.0);
    }
    const double r = Pearson(x, y).r;
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
    CHECK(Pearson(y, x).r == doctest::Approx(r));
    CHECK(Pearson(x, z).r == doctest::Approx(r));
  }
}

corpus::DiscourseExample Example(std::string id, std::string conn, int words,
                                 corpus::ArgStatus status,
                                 corpus::ConnSyntax syntax = corpus::ConnSyntax::kUnknown) {
  corpus::DiscourseExample e;
  e.id = std::move(id);
  e.connective = std::move(conn);
  e.modality = corpus::Modality::kExplicit;
  e.arg1 = {"a"};
  for (int i = 1; i < words; ++i) e.arg2.push_back("b");
  e.relation_top = "x";
  e.arg_status = status;
  e.conn_syntax = syntax;
  return e;
}

TEST_CASE("factor extraction") {
  const corpus::ConnectiveInventory inv({{"but", corpus::ConnSyntax::kConjunction, {"Comparison"}},
                                         {"since", corpus::ConnSyntax::kConjunction,
                                          {"Temporal", "Contingency"}},
                                         {"however", corpus::ConnSyntax::kAdverb, {"Comparison"}}});
  const LengthRange range{2, 12};
  const auto f1 = ExtractFactors(Example("1", "but", 7, corpus::ArgStatus::kIntraSentential), inv, range);
  CHECK(f1 == FactorVector{1, 0, 1, 0.5});
  const auto f2 = ExtractFactors(Example("2", "since", 2, corpus::ArgStatus::kInterSentential), inv, range);
  CHECK(f2 == FactorVector{1, 1, 0, 0.0});
  const auto f3 = ExtractFactors(Example("3", "however", 30, corpus::ArgStatus::kUnknown), inv, range);
  CHECK(f3 == FactorVector{0, 0, 0, 1.0});
  // Annotated syntax wins over the inventory.
  const auto f4 = ExtractFactors(
      Example("4", "however", 12, corpus::ArgStatus::kIntraSentential, corpus::ConnSyntax::kConjunction),
      inv, range);
  CHECK(f4.conj_vs_adv == 1);
  CHECK(ExtractFactors(Example("5", "but", 9, corpus::ArgStatus::kUnknown), inv, {4, 4}).norm_length == 0.0);
}

TEST_CASE("factor tables round-trip") {
  corpus::LabelScheme scheme("t", corpus::SchemeLevel::kTop, {"x"});
  const corpus::Corpus c(scheme, {Example("a", "but", 3, corpus::ArgStatus::kIntraSentential),
                                  Example("b\tq", "however", 5, corpus::ArgStatus::kInterSentential)});
  const std::vector<double> scores = {0.25, -0.125};
  const FactorTable t = BuildFactorTable(c, scores, corpus::ConnectiveInventory::Default());
  CHECK(t.factors[0].norm_length == 0.0);
  CHECK(t.factors[1].norm_length == 1.0);
  const auto path = std::filesystem::temp_directory_path() / "connshift_factor_table.tsv";
  WriteFactorTable(path, t);
  const FactorTable back = ReadFactorTable(path);
  CHECK(back.ids == t.ids);
  CHECK(back.factors == t.factors);
  CHECK(back.scores == t.scores);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(BuildFactorTable(c, std::vector<double>{1.0}, corpus::ConnectiveInventory::Default()),
                  DataError);
}

TEST_CASE("GBDT importance") {
  nn::Rng rng(2);
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  for (int i = 0; i < 300; ++i) {
    const double a = rng.OpenUniform(), b = rng.OpenUniform();
    rows.push_back({a, b, 1.0});
    y.push_back(a > 0.5 ? 1.0 : 0.0);
  }
  const auto imp = GbdtImportance(rows, y);
  REQUIRE(imp.size() == 3);
  CHECK(imp[0] > 0.9);
  CHECK(imp[2] == 0.0);
  CHECK(imp[0] + imp[1] + imp[2] == doctest::Approx(1.0));
  // Deterministic.
  CHECK(GbdtImportance(rows, y) == imp);

  std::vector<std::vector<double>> flat(10, std::vector<double>{1.0, 2.0});
  std::vector<double> t(10, 0.0);
  t[3] = 1.0;
  CHECK_THROWS_AS(GbdtImportance(flat, t), UndefinedError);
}

TEST_CASE("GBDT importance sums to one when the target is constant") {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({static_cast<double>(i), 3.0});
  const auto imp = GbdtImportance(rows, std::vector<double>(10, 0.5));
  CHECK(imp[0] == doctest::Approx(1.0));
  CHECK(imp[1] == 0.0);
}

}  // namespace
}  // namespace connshift::factors
