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

#ifndef CONNSHIFT_ENCODER_VOCAB_H_
#define CONNSHIFT_ENCODER_VOCAB_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "connshift/corpus/types.h"

namespace connshift::encoder {

// Word-level vocabulary. Words are lower-cased; ids 0..4 are reserved.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;  // "<s>", the representation token
  static constexpr int kEos = 3;  // "</s>"
  static constexpr int kMask = 4;

  Vocab();
  explicit Vocab(std::vector<std::string> words);  // words[0..4] = specials

  // Every argument and connective word of `examples`, in first-seen order.
  static Vocab Build(std::span<const corpus::DiscourseExample> examples);

  int Id(std::string_view word) const;
  std::vector<int> Ids(std::span<const std::string> words) const;
  const std::vector<std::string>& words() const { return words_; }
  int size() const { return static_cast<int>(words_.size()); }
  void Add(std::string_view word);

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

struct PackedInput {
  std::vector<int> ids;
  // Position of the connective slot: the mask placeholder or the first
  // connective token; -1 when no connective was inserted.
  int connective_position = -1;
  int connective_length = 0;
};

enum class ConnectiveSlot {
  kNone,         // <s> arg1 arg2 </s>
  kConnective,   // <s> arg1 conn arg2 </s>   (empty conn == kNone)
  kMask,         // <s> arg1 <mask> arg2 </s>
};

// Packs an example into one sequence. When the sequence exceeds
// max_length, tokens are removed from the tail of whichever argument is
// currently longer (arg2 on ties), keeping at least one token per argument.
// Connective tokens are never removed; throws DataError if even the minimal
// sequence does not fit.
PackedInput Pack(const Vocab& vocab, std::span<const std::string> arg1,
                  std::span<const std::string> arg2,
                  const std::optional<std::string>& connective,
                  ConnectiveSlot slot, int max_length);

}  // namespace connshift::encoder

#endif  // CONNSHIFT_ENCODER_VOCAB_H_
