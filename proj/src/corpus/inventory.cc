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

#include "connshift/corpus/inventory.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "connshift/error.h"
#include "connshift/log.h"

namespace connshift::corpus {

// Defined in the generated embedded_inventory.cc.
extern const char* const kEmbeddedInventoryTsv;

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

bool IsPunct(unsigned char c) { return std::ispunct(c) != 0; }

// Lower-cased word with surrounding punctuation removed; empty when the
// token is punctuation only.
std::string CoreWord(std::string_view token, bool* trailing_punct) {
  std::size_t b = 0, e = token.size();
  while (b < e && IsPunct(token[b])) ++b;
  while (e > b && IsPunct(token[e - 1])) --e;
  if (trailing_punct) *trailing_punct = e < token.size();
  std::string out(token.substr(b, e - b));
  for (char& c : out) c = static_cast<char>(std::tolower(c));
  return out;
}

}  // namespace

std::string NormalizeSurface(std::string_view surface) {
  std::string out;
  for (const auto& tok : Tokenize(surface)) {
    if (!out.empty()) out += ' ';
    for (char c : tok) out += static_cast<char>(std::tolower(c));
  }
  return out;
}

ConnectiveInventory::ConnectiveInventory(std::vector<ConnectiveEntry> entries)
    : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto& e = entries_[i];
    e.surface = NormalizeSurface(e.surface);
    if (e.surface.empty()) throw DataError("empty connective surface");
    if (!by_surface_.emplace(e.surface, i).second) {
      throw DataError("duplicate connective '" + e.surface + "'");
    }
    max_words_ = std::max(max_words_, Tokenize(e.surface).size());
  }
}

const ConnectiveInventory& ConnectiveInventory::Default() {
  static const ConnectiveInventory inventory = Parse(kEmbeddedInventoryTsv);
  return inventory;
}

ConnectiveInventory ConnectiveInventory::Parse(std::string_view tsv) {
  std::vector<ConnectiveEntry> entries;
  std::istringstream in{std::string(tsv)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cols = SplitOn(line, '\t');
    if (cols.size() != 3) {
      throw DataError("connective inventory line " + std::to_string(line_no) +
                      ": expected 3 columns");
    }
    if (cols[0] == "surface") continue;
    ConnectiveEntry e;
    e.surface = cols[0];
    e.syntax = ConnSyntaxFromString(cols[1]);
    for (auto& rel : SplitOn(cols[2], ',')) {
      if (!rel.empty()) e.signalable_relations.push_back(rel);
    }
    entries.push_back(std::move(e));
  }
  return ConnectiveInventory(std::move(entries));
}

ConnectiveInventory ConnectiveInventory::Load(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open connective inventory " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

const ConnectiveEntry* ConnectiveInventory::Find(
    std::string_view surface) const {
  auto it = by_surface_.find(NormalizeSurface(surface));
  return it == by_surface_.end() ? nullptr : &entries_[it->second];
}

ConnectiveEntry ConnectiveInventory::Lookup(std::string_view surface) const {
  if (const auto* e = Find(surface)) return *e;
  LogWarning("connective '" + std::string(surface) +
             "' not in inventory; treating as unambiguous adverb");
  ConnectiveEntry fallback;
  fallback.surface = NormalizeSurface(surface);
  fallback.syntax = ConnSyntax::kAdverb;
  return fallback;
}

std::optional<ConnectiveInventory::Match> ConnectiveInventory::MatchPrefix(
    std::span<const std::string> tokens) const {
  std::size_t start = 0;
  while (start < tokens.size() && CoreWord(tokens[start], nullptr).empty()) {
    ++start;
  }
  // Words available for matching: stop at a punctuation-only token or
  // after a word that carries trailing punctuation ("however,").
  std::vector<std::string> words;
  for (std::size_t i = start; i < tokens.size() && words.size() < max_words_;
       ++i) {
    bool trailing = false;
    std::string w = CoreWord(tokens[i], &trailing);
    if (w.empty()) break;
    words.push_back(std::move(w));
    if (trailing) break;
  }
  for (std::size_t k = words.size(); k >= 1; --k) {
    std::string candidate;
    for (std::size_t i = 0; i < k; ++i) {
      if (i) candidate += ' ';
      candidate += words[i];
    }
    if (by_surface_.contains(candidate)) {
      return Match{candidate, start + k};
    }
  }
  return std::nullopt;
}

}  // namespace connshift::corpus
