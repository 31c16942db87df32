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


#include "connshift/audit/audit.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "connshift/corpus/io.h"
#include "connshift/error.h"
#include "connshift/log.h"

namespace connshift::audit {

namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

void Validate(const AnnotationPair& pair) {
  const std::string where = pair.id.empty() ? "annotation" : "annotation " + pair.id;
  if (pair.new_labels.empty()) throw DataError(where + ": empty new annotation");
  for (const auto& l : pair.new_labels) {
    if (l.empty()) throw DataError(where + ": empty label in new annotation");
    if (l == kNoRel && pair.new_labels.size() > 1) {
      throw DataError(where + ": NoRel cannot be combined with other labels");
    }
  }
  if (pair.original.empty() || pair.original == kNoRel) {
    throw DataError(where + ": original label must be a relation");
  }
}

AnnotationPair MakePair(std::string id, std::string_view new_field,
                        std::string original) {
  AnnotationPair p;
  p.id = std::move(id);
  p.original = Trim(original);
  std::stringstream ss{std::string(new_field)};
  std::string item;
  while (std::getline(ss, item, ';')) {
    std::string label = Trim(item);
    if (label.empty()) continue;
    if (std::find(p.new_labels.begin(), p.new_labels.end(), label) ==
        p.new_labels.end()) {
      p.new_labels.push_back(std::move(label));
    }
  }
  Validate(p);
  return p;
}

std::string_view ToString(ShiftCase c) {
  switch (c) {
    case ShiftCase::kNone: return "none";
    case ShiftCase::kCase1: return "case1";
    case ShiftCase::kCase2: return "case2";
    case ShiftCase::kCase3: return "case3";
  }
  return "none";
}

ShiftCase Categorize(const AnnotationPair& pair) {
  Validate(pair);
  const std::set<std::string> na(pair.new_labels.begin(), pair.new_labels.end());
  if (na.size() == 1 && *na.begin() == pair.original) return ShiftCase::kNone;
  if (na.count(pair.original)) return ShiftCase::kCase2;
  if (pair.no_rel()) return ShiftCase::kCase3;
  return ShiftCase::kCase1;
}

ShiftCounts CategorizeShifts(std::span<const AnnotationPair> pairs) {
  ShiftCounts c;
  c.pairs = static_cast<int>(pairs.size());
  for (const auto& p : pairs) {
    switch (Categorize(p)) {
      case ShiftCase::kNone: continue;
      case ShiftCase::kCase1: ++c.case1; break;
      case ShiftCase::kCase2: ++c.case2; break;
      case ShiftCase::kCase3: ++c.case3; break;
    }
    ++c.shift_num;
  }
  return c;
}

double CohenKappa(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() != b.size()) throw UsageError("cohen_kappa: sequences differ in length");
  if (a.empty()) throw UsageError("cohen_kappa: empty sequences");
  const double n = static_cast<double>(a.size());
  std::map<std::string, double> ma, mb;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma[a[i]] += 1.0;
    mb[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double po = agree / n;
  double pe = 0.0;
  for (const auto& [label, count] : ma) {
    auto it = mb.find(label);
    if (it != mb.end()) pe += (count / n) * (it->second / n);
  }
  if (pe >= 1.0) {
    LogWarning("cohen_kappa: chance agreement is 1 (one shared constant label); "
               "kappa set to 1.0");
    return 1.0;
  }
  return std::clamp((po - pe) / (1.0 - pe), -1.0, 1.0);
}

std::vector<AnnotationPair> ReadAnnotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open annotation file " + path.string());
  std::vector<AnnotationPair> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (line_no == 1 && !cols.empty() && cols[0] == "example_id") continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (cols.size() != 3) throw DataError(where + ": expected 3 columns");
    try {
      out.push_back(MakePair(corpus::UnescapeField(cols[0]), cols[1], cols[2]));
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return out;
}

void WriteAnnotations(const std::filesystem::path& path,
                      std::span<const AnnotationPair> pairs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "example_id\tnew_labels\toriginal_label\n";
  for (const auto& p : pairs) {
    Validate(p);
    out << corpus::EscapeField(p.id) << '\t';
    for (std::size_t i = 0; i < p.new_labels.size(); ++i) {
      out << (i ? ";" : "") << p.new_labels[i];
    }
    out << '\t' << p.original << '\n';
  }
}

nlohmann::json AuditReport(std::span<const AnnotationPair> pairs,
                           std::span<const AnnotationPair> second) {
  const ShiftCounts c = CategorizeShifts(pairs);
  nlohmann::json report = {{"pairs", c.pairs},
                           {"shift_num", c.shift_num},
                           {"case1", c.case1},
                           {"case2", c.case2},
                           {"case3", c.case3}};
  nlohmann::json per = nlohmann::json::array();
  for (const auto& p : pairs) {
    per.push_back({{"id", p.id}, {"case", ToString(Categorize(p))}});
  }
  report["examples"] = std::move(per);
  if (!second.empty()) {
    std::map<std::string, const AnnotationPair*> by_id;
    for (const auto& p : second) by_id[p.id] = &p;
    std::vector<std::string> a, b;
    for (const auto& p : pairs) {
      auto it = by_id.find(p.id);
      if (it == by_id.end()) {
        throw DataError("second annotator has no annotation for " + p.id);
      }
      a.push_back(p.primary());
      b.push_back(it->second->primary());
    }
    report["kappa"] = CohenKappa(a, b);
    report["kappa_basis"] = "primary (first-listed) label";
  }
  return report;
}

}  // namespace connshift::audit
