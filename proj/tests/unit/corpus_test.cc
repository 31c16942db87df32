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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "connshift/corpus/inventory.h"
#include "connshift/corpus/io.h"
#include "connshift/corpus/transforms.h"
#include "connshift/corpus/types.h"
#include "connshift/error.h"
#include "connshift/log.h"
#include "connshift/nn/rng.h"

namespace connshift::corpus {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("connshift_corpus_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

DiscourseExample Unit(std::string id, std::string arg1, std::string arg2,
                      std::string label, bool adjacent, Split split = Split::kTrain) {
  DiscourseExample e;
  e.id = std::move(id);
  e.arg1 = Tokenize(arg1);
  e.arg2 = Tokenize(arg2);
  e.relation_top = std::move(label);
  e.units_adjacent = adjacent;
  e.split = split;
  return e;
}

// Silences warnings for the duration of a test and counts them.
struct CapturedLog {
  int warnings = 0;
  LogSink previous;
  CapturedLog() {
    previous = SetLogSink([this](LogLevel level, std::string_view) {
      if (level == LogLevel::kWarning) ++warnings;
    });
  }
  ~CapturedLog() { SetLogSink(previous); }
};

TEST_CASE("built-in label schemes have the published sizes") {
  CHECK(LabelScheme::Pdtb2Top().size() == 4);
  CHECK(LabelScheme::Pdtb2Second().size() == 11);
  CHECK(LabelScheme::Pdtb3Top().size() == 4);
  CHECK(LabelScheme::Pdtb3Second().size() == 14);
  const auto gum = LabelScheme::Gum();
  CHECK(gum.size() == 7);
  for (const char* l : {"joint", "adversative", "context", "causal",
                        "elaboration", "explanation", "contingency"}) {
    CHECK(gum.Contains(l));
  }
  for (const auto& s : {LabelScheme::Pdtb2Second(), LabelScheme::Pdtb3Second()}) {
    for (const auto& l : s.labels()) CHECK(s.ParentOf(l).has_value());
  }
  CHECK_THROWS_AS(LabelScheme("dup", SchemeLevel::kTop, {"a", "a"}), DataError);
  CHECK_THROWS_AS(LabelScheme("orphan", SchemeLevel::kSecond, {"a.b"}), DataError);
}

TEST_CASE("scheme validation of example invariants") {
  const auto s = LabelScheme::Pdtb2Second();
  DiscourseExample e = Unit("x", "a", "b", "Comparison", false);
  e.relation_second = "Comparison.Contrast";
  CHECK_FALSE(s.Validate(e).has_value());
  e.relation_second = "Expansion.List";
  CHECK(s.Validate(e).has_value());
  const auto top = LabelScheme::Pdtb2Top();
  DiscourseExample ex = Unit("y", "a", "b", "Comparison", false);
  ex.modality = Modality::kExplicit;
  CHECK(top.Validate(ex).has_value());  // explicit without connective
  ex.connective = "but";
  CHECK_FALSE(top.Validate(ex).has_value());
  DiscourseExample empty_arg = Unit("z", "", "b", "Comparison", false);
  CHECK(top.Validate(empty_arg).has_value());
  CHECK_THROWS_AS(Corpus(top, {empty_arg}), DataError);
}

TEST_CASE("connective inventory invariants") {
  const auto& inv = ConnectiveInventory::Default();
  CHECK(inv.size() >= 99u);
  std::set<std::string> seen;
  for (const auto& e : inv.entries()) {
    CHECK(e.surface == NormalizeSurface(e.surface));
    CHECK(seen.insert(e.surface).second);
    CHECK(e.ambiguous() == (e.signalable_relations.size() > 1));
    CHECK(e.syntax != ConnSyntax::kUnknown);
  }
  REQUIRE(inv.Find("and"));
  CHECK(inv.Find("and")->syntax == ConnSyntax::kConjunction);
  CHECK(inv.Find("and")->ambiguous());
  REQUIRE(inv.Find("however"));
  CHECK(inv.Find("however")->syntax == ConnSyntax::kAdverb);

  CapturedLog log;
  ConnectiveEntry unknown = inv.Lookup("zorblatt");
  CHECK(unknown.syntax == ConnSyntax::kAdverb);
  CHECK_FALSE(unknown.ambiguous());
  CHECK(log.warnings == 1);
  CHECK_THROWS_AS(ConnectiveInventory::Parse("and\tconjunction\tA\nand\tadverb\tB\n"),
                  DataError);
}

TEST_CASE("longest match wins at the start of unit2") {
  const auto& inv = ConnectiveInventory::Default();
  auto m = inv.MatchPrefix(Tokenize("as a result , prices fell"));
  REQUIRE(m);
  CHECK(m->surface == "as a result");
  CHECK(m->tokens_consumed == 3u);
  auto m2 = inv.MatchPrefix(Tokenize("As prices fell"));
  REQUIRE(m2);
  CHECK(m2->surface == "as");
  auto m3 = inv.MatchPrefix(Tokenize("However, nobody came"));
  REQUIRE(m3);
  CHECK(m3->surface == "however");
  CHECK(m3->tokens_consumed == 1u);
  CHECK_FALSE(inv.MatchPrefix(Tokenize("asking nobody")));
  CHECK_FALSE(inv.MatchPrefix(Tokens{}));
}

TEST_CASE("split rule: adjacency plus a leading connective") {
  const auto& inv = ConnectiveInventory::Default();
  std::vector<DiscourseExample> in = {
      Unit("a", "we waited", "however , nobody came", "adversative", true),
      Unit("b", "we left", "because it rained", "causal", false),
      Unit("c", "we left", "it rained", "causal", true),
      Unit("d", "we left", "because", "causal", true),
  };
  ModalitySplit s = SplitByLeadingConnective(in, inv);
  REQUIRE(s.explicit_corpus.size() == 1u);
  const auto& e = s.explicit_corpus[0];
  CHECK(e.id == "a");
  CHECK(e.connective == std::optional<std::string>("however"));
  CHECK(e.arg2 == Tokenize("nobody came"));
  CHECK(e.modality == Modality::kExplicit);
  CHECK(e.conn_syntax == ConnSyntax::kAdverb);
  CHECK(s.implicit_corpus.size() == 3u);
  for (const auto& x : s.implicit_corpus.examples()) {
    CHECK(x.modality == Modality::kImplicit);
    CHECK_FALSE(x.connective.has_value());
  }
}

TEST_CASE("split is a deterministic, idempotent partition") {
  const auto& inv = ConnectiveInventory::Default();
  nn::Rng rng(17);
  const std::vector<std::string> starts = {"however", "but", "as a result", "as",
                                           "then", "the", "so", "meanwhile", "it"};
  const std::vector<std::string> labels = {"joint", "causal", "context"};
  std::vector<DiscourseExample> in;
  for (int i = 0; i < 300; ++i) {
    in.push_back(Unit("u" + std::to_string(i), "first unit here",
                      starts[rng.Index(starts.size())] + " , more words",
                      labels[rng.Index(labels.size())], rng.Index(2) == 0,
                      kAllSplits[rng.Index(3)]));
  }
  ModalitySplit a = SplitByLeadingConnective(in, inv);
  ModalitySplit b = SplitByLeadingConnective(in, inv);
  CHECK(std::equal(a.explicit_corpus.examples().begin(), a.explicit_corpus.examples().end(),
                   b.explicit_corpus.examples().begin(), b.explicit_corpus.examples().end()));
  std::set<std::string> ids;
  for (const auto& e : a.explicit_corpus.examples()) CHECK(ids.insert(e.id).second);
  for (const auto& e : a.implicit_corpus.examples()) CHECK(ids.insert(e.id).second);
  CHECK(ids.size() == in.size());

  std::vector<DiscourseExample> again(a.explicit_corpus.examples().begin(),
                                      a.explicit_corpus.examples().end());
  again.insert(again.end(), a.implicit_corpus.examples().begin(),
               a.implicit_corpus.examples().end());
  ModalitySplit c = SplitByLeadingConnective(again, inv);
  CHECK(c.explicit_corpus.size() == a.explicit_corpus.size());
  CHECK(c.implicit_corpus.size() == a.implicit_corpus.size());
  for (std::size_t i = 0; i < c.explicit_corpus.size(); ++i) {
    CHECK(c.explicit_corpus[i] == a.explicit_corpus[i]);
  }
}

TEST_CASE("frequency filter keeps labels above the explicit train count") {
  LabelScheme s("ab", SchemeLevel::kTop, {"A", "B"});
  std::vector<DiscourseExample> ex;
  for (int i = 0; i < 150; ++i) ex.push_back(Unit("a" + std::to_string(i), "x", "y", "A", false));
  for (int i = 0; i < 50; ++i) ex.push_back(Unit("b" + std::to_string(i), "x", "y", "B", false));
  ex.push_back(Unit("t", "x", "y", "B", false, Split::kTest));
  Corpus c(s, ex);
  Corpus f = FilterMinFrequency(c, 100);
  CHECK(f.scheme().labels() == std::vector<std::string>{"A"});
  CHECK(f.size() == 150u);
  Corpus same = FilterMinFrequency(c, 0);
  CHECK(same.size() == c.size());
  CHECK(same.scheme() == c.scheme());
  // Exactly min_count occurrences do not survive.
  Corpus edge = FilterMinFrequency(c, 150);
  CHECK(edge.empty());
}

TEST_CASE("corpus statistics by hand tally") {
  LabelScheme s("ab", SchemeLevel::kTop, {"A", "B"});
  Corpus c(s, {Unit("1", "x", "y", "A", false, Split::kTrain),
               Unit("2", "x", "y", "B", false, Split::kTrain),
               Unit("3", "x", "y", "A", false, Split::kTest)});
  CountTable t = CorpusStats(c);
  CHECK(t.counts[Split::kTrain]["A"] == 1);
  CHECK(t.counts[Split::kTrain]["B"] == 1);
  CHECK(t.counts[Split::kTest]["A"] == 1);
  CHECK_FALSE(t.counts.contains(Split::kDev));
  CHECK(t.Total(Split::kTrain) == 2);
  CHECK(t.Total() == 3);
  CHECK(CorpusStats(Corpus(s, {})).empty());
}

TEST_CASE("canonical TSV round-trips arbitrary examples") {
  nn::Rng rng(23);
  const std::vector<std::string> words = {"a", "b\\c", "d", "é", "\\t", "x"};
  std::vector<DiscourseExample> ex;
  for (int i = 0; i < 50; ++i) {
    DiscourseExample e;
    e.id = "id\t" + std::to_string(i) + "\n";
    for (int k = 0; k < 1 + static_cast<int>(rng.Index(4)); ++k) e.arg1.push_back(words[rng.Index(words.size())]);
    for (int k = 0; k < 1 + static_cast<int>(rng.Index(4)); ++k) e.arg2.push_back(words[rng.Index(words.size())]);
    e.relation_top = "Comparison";
    if (rng.Index(2)) e.relation_second = "Comparison.Contrast";
    if (rng.Index(2)) {
      e.connective = "as a result";
      e.modality = Modality::kExplicit;
      e.conn_syntax = ConnSyntax::kAdverb;
    }
    e.arg_status = rng.Index(2) ? ArgStatus::kIntraSentential : ArgStatus::kUnknown;
    ex.push_back(e);
  }
  std::stringstream buf;
  WriteTsv(buf, ex);
  std::vector<RowError> errors;
  auto back = ReadTsv(buf, Split::kTrain, &errors);
  CHECK(errors.empty());
  REQUIRE(back.size() == ex.size());
  for (std::size_t i = 0; i < ex.size(); ++i) CHECK(back[i] == ex[i]);
  CHECK(UnescapeField(EscapeField("a\tb\\n\nc")) == "a\tb\\n\nc");
}

TEST_CASE("malformed TSV rows are reported with line numbers and skipped") {
  std::stringstream in;
  in << kTsvHeader << "\n"
     << "ok\ta\t\tb\tComparison\t\timplicit\tunknown\tunknown\n"
     << "short\trow\n"
     << "bad\ta\t\tb\tComparison\t\tsideways\tunknown\tunknown\n"
     << "noconn\ta\t\tb\tComparison\t\texplicit\tunknown\tunknown\n";
  std::vector<RowError> errors;
  CapturedLog log;
  auto rows = ReadTsv(in, Split::kDev, &errors, "mem.tsv");
  REQUIRE(rows.size() == 1u);
  CHECK(rows[0].split == Split::kDev);
  REQUIRE(errors.size() == 3u);
  CHECK(errors[0].line == 3);
  CHECK(errors[0].file == "mem.tsv");
  CHECK(errors[1].line == 4);
  CHECK(errors[2].line == 5);
}

TEST_CASE("corpus directories hold one file per split") {
  fs::path dir = TempDir("dir");
  std::vector<DiscourseExample> ex = {Unit("1", "x", "y", "A", false, Split::kTrain),
                                      Unit("2", "x", "y", "A", false, Split::kDev),
                                      Unit("3", "x", "y", "A", false, Split::kTest)};
  for (auto& e : ex) e.units_adjacent = false;
  WriteCorpusDir(dir, ex);
  CHECK(fs::exists(dir / "train.tsv"));
  auto back = ReadCorpusDir(dir);
  REQUIRE(back.size() == 3u);
  CHECK(back[1].split == Split::kDev);
  CHECK_THROWS_AS(ReadCorpusDir(dir / "missing"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("rels rows round-trip; header-only files are empty") {
  RelsRow r{"doc1", "1-5", "6-9", "we waited", "however , nobody came",
            "1-9", "1-9", "We waited however nobody came", "same",
            "1>2", "contrast", "adversative"};
  std::stringstream buf;
  WriteRelsRows(buf, std::vector<RelsRow>{r});
  auto back = ReadRelsRows(buf);
  REQUIRE(back.size() == 1u);
  CHECK(back[0] == r);

  std::stringstream header_only;
  header_only << kRelsHeader << "\n";
  CHECK(ReadRelsRows(header_only).empty());
}

TEST_CASE("rels loading: adjacency, sentence status, flags and row errors") {
  CHECK(UnitsAdjacent("1-5", "6-9"));
  CHECK(UnitsAdjacent("10-12", "3-9"));
  CHECK_FALSE(UnitsAdjacent("1-5", "7-9"));
  CHECK(UnitsAdjacent("1-2,4-5", "6"));
  CHECK_FALSE(UnitsAdjacent("x", "6"));

  fs::path dir = TempDir("rels");
  fs::path file = dir / "eng.rst.gum_dev.rels";
  {
    std::ofstream out(file);
    out << kRelsHeader << "\n"
        << "d1\t1-3\t4-6\ta b c\tbut d e\t1-6\t1-6\ts\ts\t1>2\tcontrast\tadversative\n"
        << "d1\t1-3\t9-12\ta b c\tso f g\t1-6\t7-12\ts\tt\t1>2\tresult\tcausal\n"
        << "d1\t1-3\n"
        << "d2\t1-3\t4-6\ta b c\td e\t1-6\t1-6\ts\ts\t1>2\tweird\tmystery\n";
  }
  CapturedLog log;
  RelsLoadResult res = LoadRels(file);
  REQUIRE(res.examples.size() == 3u);
  CHECK(res.errors.size() == 1u);
  CHECK(res.errors[0].line == 4);
  const auto& e0 = res.examples[0];
  CHECK(e0.split == Split::kDev);
  CHECK(e0.units_adjacent);
  CHECK(e0.arg_status == ArgStatus::kIntraSentential);
  CHECK(e0.relation_top == "adversative");
  CHECK_FALSE(e0.flagged);
  CHECK_FALSE(res.examples[1].units_adjacent);
  CHECK(res.examples[1].arg_status == ArgStatus::kInterSentential);
  CHECK(res.examples[2].flagged);
  CHECK(res.examples[2].relation_top == "mystery");
  fs::remove_all(dir);
}

// Builds a 48-column PDTB 2.0 row.
std::string V2Row(const std::string& type, const std::string& conn_head,
                  const std::string& conn1, const std::vector<std::string>& senses,
                  const std::string& arg1_gorn, const std::string& arg1,
                  const std::string& arg2_gorn, const std::string& arg2) {
  std::vector<std::string> c(48);
  c[0] = type;
  c[8] = conn_head;
  c[9] = conn1;
  for (std::size_t i = 0; i < senses.size(); ++i) c[11 + i] = senses[i];
  c[23] = arg1_gorn;
  c[24] = arg1;
  c[33] = arg2_gorn;
  c[34] = arg2;
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) out += (i ? "|" : "") + c[i];
  return out;
}

void WriteFile(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

TEST_CASE("PDTB 2.0 loading routes sections and projects senses") {
  fs::path root = TempDir("pdtb2");
  WriteFile(root / "02" / "wsj_0201.pipe",
            V2Row("Explicit", "but", "", {"Comparison.Contrast"}, "0,0", "prices rose",
                  "0,1", "sales fell") + "\n" +
            V2Row("Implicit", "", "because", {"Contingency.Cause.Reason"}, "1,0",
                  "he left", "2,0", "it rained") + "\n" +
            V2Row("Explicit", "and", "", {"Expansion.Conjunction", "Temporal.Synchrony"},
                  "3,0", "a b", "3,1", "c d") + "\n" +
            V2Row("EntRel", "", "", {}, "4,0", "x", "5,0", "y") + "\n" +
            "too|few|columns\n");
  WriteFile(root / "00" / "wsj_0001.pipe",
            V2Row("Explicit", "however", "", {"Comparison"}, "0,0", "a", "1,0", "b") + "\n");
  WriteFile(root / "22" / "wsj_2201.pipe",
            V2Row("Implicit", "", "then", {"Temporal.Asynchronous.Precedence"}, "0,0",
                  "a", "1,0", "b") + "\n" +
            V2Row("Implicit", "", "in fact", {"Expansion.Exception"}, "0,0", "a", "1,0",
                  "b") + "\n");
  WriteFile(root / "23" / "wsj_2301.pipe",
            V2Row("Explicit", "but", "", {"Comparison"}, "0,0", "a", "1,0", "b") + "\n");

  CapturedLog log;
  auto top = LoadPdtb(root, PdtbVersion::kV2, SchemeLevel::kTop);
  CHECK(top.explicit_corpus.size() == 3u);
  CHECK(top.implicit_corpus.size() == 3u);
  CHECK(top.errors.size() == 1u);
  CHECK(top.flagged_multi_sense == 1u);
  auto stats = CorpusStats(top.explicit_corpus);
  CHECK(stats.Total(Split::kTrain) == 2);
  CHECK(stats.Total(Split::kDev) == 1);
  CHECK(stats.Total(Split::kTest) == 0);
  // Sections are read in order, so 00 (dev) precedes 02.
  CHECK(top.explicit_corpus[0].split == Split::kDev);
  const auto& first = top.explicit_corpus[1];
  CHECK(first.id == "wsj_0201.pipe:1");
  CHECK(first.connective == std::optional<std::string>("but"));
  CHECK(first.relation_top == "Comparison");
  CHECK(first.conn_syntax == ConnSyntax::kConjunction);
  CHECK(first.arg_status == ArgStatus::kIntraSentential);
  CHECK(top.implicit_corpus[0].arg_status == ArgStatus::kInterSentential);
  CHECK(top.implicit_corpus[0].connective == std::optional<std::string>("because"));

  auto second = LoadPdtb(root, PdtbVersion::kV2, SchemeLevel::kSecond);
  // "Comparison" alone (dev) and "Expansion.Exception" (test) are outside
  // the 11-label scheme.
  CHECK(second.explicit_corpus.size() == 2u);
  CHECK(second.implicit_corpus.size() == 2u);
  CHECK(second.dropped_out_of_scheme == 2u);
  CHECK(second.explicit_corpus[0].relation_second ==
        std::optional<std::string>("Comparison.Contrast"));
  fs::remove_all(root);
}

TEST_CASE("PDTB 3.0 loading reads spans from raw text") {
  fs::path root = TempDir("pdtb3");
  const std::string raw = "Prices rose but sales fell. He left.";
  WriteFile(root / "raw" / "21" / "wsj_2101", raw);
  std::vector<std::string> c(32);
  c[0] = "Explicit";
  c[1] = "12..15";
  c[8] = "Comparison.Concession.Arg2-as-denier";
  c[14] = "0..11";
  c[20] = "16..26";
  std::string row;
  for (std::size_t i = 0; i < c.size(); ++i) row += (i ? "|" : "") + c[i];
  c[1] = "999..1000";
  std::string bad;
  for (std::size_t i = 0; i < c.size(); ++i) bad += (i ? "|" : "") + c[i];
  WriteFile(root / "gold" / "21" / "wsj_2101", row + "\n" + bad + "\n");
  CapturedLog log;
  auto res = LoadPdtb(root, PdtbVersion::kV3, SchemeLevel::kSecond);
  REQUIRE(res.explicit_corpus.size() == 1u);
  const auto& e = res.explicit_corpus[0];
  CHECK(e.split == Split::kTest);
  CHECK(e.connective == std::optional<std::string>("but"));
  CHECK(e.arg1 == Tokenize("Prices rose"));
  CHECK(e.arg2 == Tokenize("sales fell"));
  CHECK(e.relation_second == std::optional<std::string>("Comparison.Concession"));
  CHECK(e.relation_top == "Comparison");
  CHECK(res.errors.size() == 1u);
  fs::remove_all(root);
}

TEST_CASE("PDTB loader edge cases") {
  CHECK_THROWS_AS(LoadPdtb("/nonexistent/connshift", PdtbVersion::kV2, SchemeLevel::kTop),
                  IoError);
  fs::path root = TempDir("pdtb_empty");
  auto res = LoadPdtb(root, PdtbVersion::kV2, SchemeLevel::kTop);
  CHECK(res.explicit_corpus.empty());
  CHECK(res.implicit_corpus.empty());
  CHECK(res.errors.empty());
  auto res3 = LoadPdtb(root, PdtbVersion::kV3, SchemeLevel::kTop);
  CHECK(res3.explicit_corpus.empty());
  fs::remove_all(root);
  CHECK(ProjectSense("Contingency.Cause.Reason", LabelScheme::Pdtb2Second()) ==
        std::optional<std::string>("Contingency.Cause"));
  CHECK(ProjectSense("Contingency.Cause.Reason", LabelScheme::Pdtb2Top()) ==
        std::optional<std::string>("Contingency"));
  CHECK_FALSE(ProjectSense("Bogus", LabelScheme::Pdtb2Top()));
}

}  // namespace
}  // namespace connshift::corpus
