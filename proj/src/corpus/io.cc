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

#include "connshift/corpus/io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "connshift/error.h"
#include "connshift/log.h"

namespace connshift::corpus {
namespace fs = std::filesystem;

namespace {

std::vector<std::string> SplitOn(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<long> ParseInt(std::string_view s) {
  s = Trim(s);
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::ifstream OpenOrThrow(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::string ReadAll(const fs::path& path) {
  auto in = OpenOrThrow(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool GetLine(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

// --- canonical TSV ----------------------------------------------------------

std::string EscapeField(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string UnescapeField(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    char c = escaped[i];
    if (c != '\\' || i + 1 == escaped.size()) {
      out += c;
      continue;
    }
    char n = escaped[++i];
    switch (n) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case '\\': out += '\\'; break;
      default:
        out += '\\';
        out += n;
    }
  }
  return out;
}

void WriteTsv(std::ostream& out, std::span<const DiscourseExample> examples) {
  out << kTsvHeader << '\n';
  for (const auto& e : examples) {
    out << EscapeField(e.id) << '\t' << EscapeField(Join(e.arg1)) << '\t'
        << EscapeField(e.connective.value_or("")) << '\t'
        << EscapeField(Join(e.arg2)) << '\t' << EscapeField(e.relation_top)
        << '\t' << EscapeField(e.relation_second.value_or("")) << '\t'
        << ToString(e.modality) << '\t' << ToString(e.conn_syntax) << '\t'
        << ToString(e.arg_status) << '\n';
  }
}

void WriteTsv(const fs::path& path,
              std::span<const DiscourseExample> examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  WriteTsv(out, examples);
  if (!out) throw IoError("short write to " + path.string());
}

std::vector<DiscourseExample> ReadTsv(std::istream& in, Split split,
                                      std::vector<RowError>* errors,
                                      std::string_view source) {
  std::vector<DiscourseExample> out;
  std::string line;
  int line_no = 0;
  auto report = [&](std::string msg) {
    LogWarning(std::string(source) + ":" + std::to_string(line_no) + ": " +
               msg);
    if (errors) errors->push_back({std::string(source), line_no, msg});
  };
  while (GetLine(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line == kTsvHeader) continue;
    auto cols = SplitOn(line, '\t');
    if (cols.size() != 9) {
      report("expected 9 columns, got " + std::to_string(cols.size()));
      continue;
    }
    try {
      DiscourseExample e;
      e.id = UnescapeField(cols[0]);
      e.arg1 = Tokenize(UnescapeField(cols[1]));
      if (!cols[2].empty()) e.connective = UnescapeField(cols[2]);
      e.arg2 = Tokenize(UnescapeField(cols[3]));
      e.relation_top = UnescapeField(cols[4]);
      if (!cols[5].empty()) e.relation_second = UnescapeField(cols[5]);
      e.modality = ModalityFromString(cols[6]);
      e.conn_syntax = ConnSyntaxFromString(cols[7]);
      e.arg_status = ArgStatusFromString(cols[8]);
      e.split = split;
      if (e.arg1.empty() || e.arg2.empty()) {
        report("empty argument");
        continue;
      }
      if (e.modality == Modality::kExplicit && !e.connective) {
        report("explicit row without connective");
        continue;
      }
      out.push_back(std::move(e));
    } catch (const DataError& err) {
      report(err.what());
    }
  }
  return out;
}

std::vector<DiscourseExample> ReadTsv(const fs::path& path, Split split,
                                      std::vector<RowError>* errors) {
  auto in = OpenOrThrow(path);
  return ReadTsv(in, split, errors, path.string());
}

void WriteCorpusDir(const fs::path& dir,
                    std::span<const DiscourseExample> examples) {
  fs::create_directories(dir);
  for (Split s : kAllSplits) {
    std::vector<DiscourseExample> part;
    for (const auto& e : examples) {
      if (e.split == s) part.push_back(e);
    }
    WriteTsv(dir / (std::string(ToString(s)) + ".tsv"), part);
  }
}

std::vector<DiscourseExample> ReadCorpusDir(const fs::path& dir,
                                            std::vector<RowError>* errors) {
  if (!fs::is_directory(dir)) {
    throw IoError("corpus directory not found: " + dir.string());
  }
  std::vector<DiscourseExample> out;
  for (Split s : kAllSplits) {
    fs::path p = dir / (std::string(ToString(s)) + ".tsv");
    if (!fs::exists(p)) continue;
    auto part = ReadTsv(p, s, errors);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

// --- PDTB -------------------------------------------------------------------

std::optional<std::string> ProjectSense(std::string_view sense,
                                        const LabelScheme& scheme) {
  sense = Trim(sense);
  if (sense.empty()) return std::nullopt;
  auto parts = SplitOn(sense, '.');
  std::string candidate = parts[0];
  if (scheme.level() == SchemeLevel::kSecond) {
    if (parts.size() < 2) return std::nullopt;
    candidate += "." + parts[1];
  }
  if (!scheme.Contains(candidate)) return std::nullopt;
  return candidate;
}

namespace {

std::optional<Split> SplitForSection(int section) {
  if (section >= 2 && section <= 20) return Split::kTrain;
  if (section == 0 || section == 1) return Split::kDev;
  if (section == 21 || section == 22) return Split::kTest;
  return std::nullopt;
}

// Sentence indices mentioned by a Gorn address list like "3,0;3,1,2".
std::set<long> GornSentences(std::string_view gorn) {
  std::set<long> out;
  for (const auto& addr : SplitOn(gorn, ';')) {
    auto head = SplitOn(addr, ',')[0];
    if (auto v = ParseInt(head)) out.insert(*v);
  }
  return out;
}

// Text covered by a PDTB 3.0 span list "12..20;31..40".
std::optional<std::string> SpanText(std::string_view spans,
                                    std::string_view raw) {
  std::string out;
  for (const auto& span : SplitOn(Trim(spans), ';')) {
    auto dots = span.find("..");
    if (dots == std::string::npos) return std::nullopt;
    auto b = ParseInt(std::string_view(span).substr(0, dots));
    auto e = ParseInt(std::string_view(span).substr(dots + 2));
    if (!b || !e || *b < 0 || *e < *b ||
        static_cast<std::size_t>(*e) > raw.size()) {
      return std::nullopt;
    }
    if (!out.empty()) out += ' ';
    out += raw.substr(*b, *e - *b);
  }
  return out;
}

struct PdtbRecord {
  std::string type;
  std::string connective;
  std::vector<std::string> senses;
  std::string arg1;
  std::string arg2;
  ArgStatus status = ArgStatus::kUnknown;
};

std::optional<PdtbRecord> ParseV2(const std::vector<std::string>& cols,
                                  std::string* why) {
  if (cols.size() != 48) {
    *why = "expected 48 columns, got " + std::to_string(cols.size());
    return std::nullopt;
  }
  PdtbRecord r;
  r.type = cols[0];
  r.connective = r.type == "Explicit" ? cols[8] : cols[9];
  for (int c : {11, 12, 13, 14}) {
    if (!Trim(cols[c]).empty()) r.senses.emplace_back(Trim(cols[c]));
  }
  r.arg1 = cols[24];
  r.arg2 = cols[34];
  auto s1 = GornSentences(cols[23]);
  auto s2 = GornSentences(cols[33]);
  if (!s1.empty() && !s2.empty()) {
    s1.insert(s2.begin(), s2.end());
    r.status = s1.size() == 1 ? ArgStatus::kIntraSentential
                              : ArgStatus::kInterSentential;
  }
  return r;
}

std::optional<PdtbRecord> ParseV3(const std::vector<std::string>& cols,
                                  std::string_view raw, std::string* why) {
  if (cols.size() < 21) {
    *why = "expected at least 21 columns, got " + std::to_string(cols.size());
    return std::nullopt;
  }
  PdtbRecord r;
  r.type = cols[0];
  if (r.type == "Explicit") {
    auto conn = SpanText(cols[1], raw);
    if (!conn) {
      *why = "bad connective span list";
      return std::nullopt;
    }
    r.connective = *conn;
  } else {
    r.connective = cols[7];
  }
  for (int c : {8, 9, 11, 12}) {
    if (!Trim(cols[c]).empty()) r.senses.emplace_back(Trim(cols[c]));
  }
  auto a1 = SpanText(cols[14], raw);
  auto a2 = SpanText(cols[20], raw);
  if (!a1 || !a2) {
    *why = "bad argument span list";
    return std::nullopt;
  }
  r.arg1 = *a1;
  r.arg2 = *a2;
  return r;
}

}  // namespace

PdtbLoadResult LoadPdtb(const fs::path& root, PdtbVersion version,
                        SchemeLevel level,
                        const ConnectiveInventory& inventory) {
  if (!fs::is_directory(root)) {
    throw IoError("PDTB root not found: " + root.string());
  }
  LabelScheme scheme = version == PdtbVersion::kV2
                           ? (level == SchemeLevel::kTop
                                  ? LabelScheme::Pdtb2Top()
                                  : LabelScheme::Pdtb2Second())
                           : (level == SchemeLevel::kTop
                                  ? LabelScheme::Pdtb3Top()
                                  : LabelScheme::Pdtb3Second());
  fs::path rel_root = version == PdtbVersion::kV2 ? root : root / "gold";
  fs::path raw_root = root / "raw";

  PdtbLoadResult result;
  std::vector<DiscourseExample> explicit_examples, implicit_examples;
  if (!fs::is_directory(rel_root)) {
    result.explicit_corpus = Corpus(scheme, {});
    result.implicit_corpus = Corpus(scheme, {});
    return result;
  }

  // Directory iteration order is unspecified; sort for determinism.
  std::vector<fs::path> section_dirs;
  for (const auto& entry : fs::directory_iterator(rel_root)) {
    if (entry.is_directory()) section_dirs.push_back(entry.path());
  }
  std::sort(section_dirs.begin(), section_dirs.end());

  for (const auto& dir : section_dirs) {
    auto section = ParseInt(dir.filename().string());
    if (!section) continue;
    auto split = SplitForSection(static_cast<int>(*section));
    if (!split) continue;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::string raw;
      if (version == PdtbVersion::kV3) {
        fs::path raw_file = raw_root / dir.filename() / file.stem();
        raw = ReadAll(raw_file);
      }
      auto in = OpenOrThrow(file);
      std::string line;
      int line_no = 0;
      while (GetLine(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cols = SplitOn(line, '|');
        std::string why;
        auto rec = version == PdtbVersion::kV2 ? ParseV2(cols, &why)
                                               : ParseV3(cols, raw, &why);
        if (!rec) {
          LogWarning(file.string() + ":" + std::to_string(line_no) + ": " +
                     why);
          result.errors.push_back({file.string(), line_no, why});
          continue;
        }
        bool is_explicit = rec->type == "Explicit";
        if (!is_explicit && rec->type != "Implicit") continue;

        DiscourseExample e;
        e.id = file.filename().string() + ":" + std::to_string(line_no);
        e.arg1 = Tokenize(rec->arg1);
        e.arg2 = Tokenize(rec->arg2);
        if (auto conn = NormalizeSurface(rec->connective); !conn.empty()) {
          e.connective = conn;
        }
        e.modality = is_explicit ? Modality::kExplicit : Modality::kImplicit;
        e.arg_status = rec->status;
        e.split = *split;
        if (rec->senses.empty()) {
          ++result.dropped_out_of_scheme;
          continue;
        }
        auto label = ProjectSense(rec->senses.front(), scheme);
        if (!label) {
          ++result.dropped_out_of_scheme;
          continue;
        }
        if (rec->senses.size() > 1) {
          e.flagged = true;
          ++result.flagged_multi_sense;
        }
        if (scheme.level() == SchemeLevel::kTop) {
          e.relation_top = *label;
        } else {
          e.relation_second = *label;
          e.relation_top = *scheme.ParentOf(*label);
        }
        if (e.connective) {
          e.conn_syntax = inventory.Find(*e.connective)
                              ? inventory.Find(*e.connective)->syntax
                              : ConnSyntax::kUnknown;
        }
        if (auto bad = scheme.Validate(e)) {
          result.errors.push_back({file.string(), line_no, *bad});
          continue;
        }
        (is_explicit ? explicit_examples : implicit_examples)
            .push_back(std::move(e));
      }
    }
  }
  result.explicit_corpus = Corpus(scheme, std::move(explicit_examples));
  result.implicit_corpus = Corpus(scheme, std::move(implicit_examples));
  return result;
}

// --- DISRPT .rels -----------------------------------------------------------

std::vector<RelsRow> ReadRelsRows(std::istream& in,
                                  std::vector<RowError>* errors,
                                  std::string_view source) {
  std::vector<RelsRow> rows;
  std::string line;
  if (!GetLine(in, line)) return rows;
  auto header = SplitOn(line, '\t');
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required : {"unit1_txt", "unit2_txt", "label"}) {
    if (!col.contains(required)) {
      throw DataError(std::string(source) + ": missing column '" + required +
                      "'");
    }
  }
  int line_no = 1;
  while (GetLine(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cols = SplitOn(line, '\t');
    if (cols.size() != header.size()) {
      std::string msg = "expected " + std::to_string(header.size()) +
                        " columns, got " + std::to_string(cols.size());
      LogWarning(std::string(source) + ":" + std::to_string(line_no) + ": " +
                 msg);
      if (errors) errors->push_back({std::string(source), line_no, msg});
      continue;
    }
    auto get = [&](const char* name) -> std::string {
      auto it = col.find(name);
      return it == col.end() ? std::string() : cols[it->second];
    };
    RelsRow r;
    r.doc = get("doc");
    r.unit1_toks = get("unit1_toks");
    r.unit2_toks = get("unit2_toks");
    r.unit1_txt = get("unit1_txt");
    r.unit2_txt = get("unit2_txt");
    r.s1_toks = get("s1_toks");
    r.s2_toks = get("s2_toks");
    r.unit1_sent = get("unit1_sent");
    r.unit2_sent = get("unit2_sent");
    r.dir = get("dir");
    r.orig_label = get("orig_label");
    r.label = get("label");
    rows.push_back(std::move(r));
  }
  return rows;
}

void WriteRelsRows(std::ostream& out, std::span<const RelsRow> rows) {
  out << kRelsHeader << '\n';
  for (const auto& r : rows) {
    out << r.doc << '\t' << r.unit1_toks << '\t' << r.unit2_toks << '\t'
        << r.unit1_txt << '\t' << r.unit2_txt << '\t' << r.s1_toks << '\t'
        << r.s2_toks << '\t' << r.unit1_sent << '\t' << r.unit2_sent << '\t'
        << r.dir << '\t' << r.orig_label << '\t' << r.label << '\n';
  }
}

namespace {

// Smallest and largest token index in "a-b,c,d-e".
std::optional<std::pair<long, long>> TokenExtent(std::string_view spans) {
  long lo = 0, hi = 0;
  bool any = false;
  for (const auto& part : SplitOn(spans, ',')) {
    auto dash = part.find('-');
    auto a = ParseInt(std::string_view(part).substr(0, dash));
    auto b = dash == std::string::npos
                 ? a
                 : ParseInt(std::string_view(part).substr(dash + 1));
    if (!a || !b) return std::nullopt;
    lo = any ? std::min(lo, *a) : *a;
    hi = any ? std::max(hi, *b) : *b;
    any = true;
  }
  if (!any) return std::nullopt;
  return std::make_pair(lo, hi);
}

}  // namespace

bool UnitsAdjacent(std::string_view unit1_toks, std::string_view unit2_toks) {
  auto a = TokenExtent(unit1_toks);
  auto b = TokenExtent(unit2_toks);
  if (!a || !b) return false;
  return a->second + 1 == b->first || b->second + 1 == a->first;
}

DiscourseExample RelsRowToExample(const RelsRow& row, std::string id,
                                  Split split, const LabelScheme* known) {
  DiscourseExample e;
  e.id = std::move(id);
  e.arg1 = Tokenize(row.unit1_txt);
  e.arg2 = Tokenize(row.unit2_txt);
  e.relation_top = row.label;
  e.modality = Modality::kImplicit;
  e.split = split;
  e.units_adjacent = UnitsAdjacent(row.unit1_toks, row.unit2_toks);
  if (!row.s1_toks.empty() && !row.s2_toks.empty()) {
    e.arg_status = row.s1_toks == row.s2_toks ? ArgStatus::kIntraSentential
                                              : ArgStatus::kInterSentential;
  }
  if (known && !known->Contains(row.label)) e.flagged = true;
  return e;
}

RelsLoadResult LoadRels(const fs::path& path, std::optional<Split> split) {
  if (!split) {
    std::string name = path.filename().string();
    if (name.find("train") != std::string::npos) {
      split = Split::kTrain;
    } else if (name.find("dev") != std::string::npos) {
      split = Split::kDev;
    } else if (name.find("test") != std::string::npos) {
      split = Split::kTest;
    } else {
      throw ConfigError("cannot infer split from file name " + name);
    }
  }
  auto in = OpenOrThrow(path);
  RelsLoadResult result;
  auto rows = ReadRelsRows(in, &result.errors, path.string());
  const LabelScheme gum = LabelScheme::Gum();
  std::string stem = path.stem().string();
  result.examples.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    std::string id = (row.doc.empty() ? stem : row.doc) + "#" +
                     std::to_string(i + 1);
    auto e = RelsRowToExample(row, std::move(id), *split, &gum);
    if (e.arg1.empty() || e.arg2.empty()) {
      result.errors.push_back(
          {path.string(), static_cast<int>(i + 2), "empty unit text"});
      continue;
    }
    result.examples.push_back(std::move(e));
  }
  return result;
}

}  // namespace connshift::corpus
