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

// Readers and writers for the supported corpus formats.
//
// Canonical TSV: a header row followed by rows of
//   id  arg1  conn  arg2  top  second  modality  conn_syntax  arg_status
// Arguments are space-joined tokens. Empty `conn` / `second` fields mean
// "absent". Tabs, newlines and backslashes inside fields are escaped as
// \t, \n and \\. A file holds one split; a corpus directory holds
// train.tsv, dev.tsv and test.tsv.

#ifndef CONNSHIFT_CORPUS_IO_H_
#define CONNSHIFT_CORPUS_IO_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "connshift/corpus/inventory.h"
#include "connshift/corpus/types.h"

namespace connshift::corpus {

struct RowError {
  std::string file;
  int line = 0;
  std::string message;
};

std::string EscapeField(std::string_view raw);
std::string UnescapeField(std::string_view escaped);

inline constexpr std::string_view kTsvHeader =
    "id\targ1\tconn\targ2\ttop\tsecond\tmodality\tconn_syntax\targ_status";

void WriteTsv(std::ostream& out, std::span<const DiscourseExample> examples);
void WriteTsv(const std::filesystem::path& path,
              std::span<const DiscourseExample> examples);

// Rows that fail to parse are skipped and reported in `errors` (when
// non-null). Missing files throw IoError.
std::vector<DiscourseExample> ReadTsv(std::istream& in, Split split,
                                      std::vector<RowError>* errors = nullptr,
                                      std::string_view source = "<stream>");
std::vector<DiscourseExample> ReadTsv(const std::filesystem::path& path,
                                      Split split,
                                      std::vector<RowError>* errors = nullptr);

void WriteCorpusDir(const std::filesystem::path& dir,
                    std::span<const DiscourseExample> examples);
std::vector<DiscourseExample> ReadCorpusDir(
    const std::filesystem::path& dir, std::vector<RowError>* errors = nullptr);

// --- PDTB -----------------------------------------------------------------

enum class PdtbVersion { kV2, kV3 };

struct PdtbLoadResult {
  Corpus explicit_corpus;
  Corpus implicit_corpus;
  std::vector<RowError> errors;
  std::size_t dropped_out_of_scheme = 0;
  std::size_t flagged_multi_sense = 0;
};

// Section directories 02-20 feed train, 00-01 dev and 21-22 test; other
// sections are ignored.
//
// v2 layout: <root>/<SS>/<file> with the 48-column PDTB 2.0 pipe format.
// v3 layout: <root>/gold/<SS>/<file> with the PDTB 3.0 gold pipe format and
// <root>/raw/<SS>/<file> holding the raw text the span lists index into.
//
// Labels are projected to `level`; relations outside the scheme are
// dropped. Multi-sense relations keep their first sense and are flagged.
PdtbLoadResult LoadPdtb(const std::filesystem::path& root, PdtbVersion version,
                        SchemeLevel level,
                        const ConnectiveInventory& inventory =
                            ConnectiveInventory::Default());

// Maps a raw PDTB sense ("Contingency.Cause.Reason") onto `scheme`.
std::optional<std::string> ProjectSense(std::string_view sense,
                                        const LabelScheme& scheme);

// --- DISRPT .rels -----------------------------------------------------------

// One row of a DISRPT relation file, column values verbatim.
struct RelsRow {
  std::string doc;
  std::string unit1_toks;
  std::string unit2_toks;
  std::string unit1_txt;
  std::string unit2_txt;
  std::string s1_toks;
  std::string s2_toks;
  std::string unit1_sent;
  std::string unit2_sent;
  std::string dir;
  std::string orig_label;
  std::string label;

  friend bool operator==(const RelsRow&, const RelsRow&) = default;
};

inline constexpr std::string_view kRelsHeader =
    "doc\tunit1_toks\tunit2_toks\tunit1_txt\tunit2_txt\ts1_toks\ts2_toks\t"
    "unit1_sent\tunit2_sent\tdir\torig_label\tlabel";

// Columns are located by header name; rows with the wrong number of
// columns are skipped and reported.
std::vector<RelsRow> ReadRelsRows(std::istream& in,
                                  std::vector<RowError>* errors = nullptr,
                                  std::string_view source = "<stream>");
void WriteRelsRows(std::ostream& out, std::span<const RelsRow> rows);

// True when the two token-span lists ("3-7", "3-5,9-10") touch.
bool UnitsAdjacent(std::string_view unit1_toks, std::string_view unit2_toks);

// Converts a row into an implicit-by-default example: unit1 -> arg1,
// unit2 -> arg2, label -> relation_top. Adjacency and sentence status are
// retained for the explicit/implicit split. Labels outside `known` (when
// given) are kept but flagged.
DiscourseExample RelsRowToExample(const RelsRow& row, std::string id,
                                  Split split,
                                  const LabelScheme* known = nullptr);

struct RelsLoadResult {
  std::vector<DiscourseExample> examples;
  std::vector<RowError> errors;
};

// The split is taken from `split` or, if absent, from the file name
// (*train*, *dev*, *test*).
RelsLoadResult LoadRels(const std::filesystem::path& path,
                        std::optional<Split> split = std::nullopt);

}  // namespace connshift::corpus

#endif  // CONNSHIFT_CORPUS_IO_H_
