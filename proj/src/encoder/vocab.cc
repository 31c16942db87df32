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

#include "connshift/encoder/vocab.h"

#include <cctype>

#include "connshift/error.h"

namespace connshift::encoder {
namespace {

std::string Lower(std::string_view w) {
  std::string out(w);
  for (char& c : out) c = static_cast<char>(std::tolower(c));
  return out;
}

}  // namespace

Vocab::Vocab() : Vocab({"<pad>", "<unk>", "<s>", "</s>", "<mask>"}) {}

Vocab::Vocab(std::vector<std::string> words) : words_(std::move(words)) {
  if (words_.size() < 5) throw DataError("vocabulary lacks special tokens");
  for (int i = 0; i < size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw DataError("duplicate vocabulary entry '" + words_[i] + "'");
    }
  }
}

void Vocab::Add(std::string_view word) {
  std::string w = Lower(word);
  if (index_.contains(w)) return;
  index_.emplace(w, size());
  words_.push_back(std::move(w));
}

Vocab Vocab::Build(std::span<const corpus::DiscourseExample> examples) {
  Vocab v;
  for (const auto& e : examples) {
    for (const auto& w : e.arg1) v.Add(w);
    if (e.connective) {
      for (const auto& w : corpus::Tokenize(*e.connective)) v.Add(w);
    }
    for (const auto& w : e.arg2) v.Add(w);
  }
  return v;
}

int Vocab::Id(std::string_view word) const {
  auto it = index_.find(Lower(word));
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocab::Ids(std::span<const std::string> words) const {
  std::vector<int> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(Id(w));
  return out;
}

PackedInput Pack(const Vocab& vocab, std::span<const std::string> arg1,
                 std::span<const std::string> arg2,
                 const std::optional<std::string>& connective,
                 ConnectiveSlot slot, int max_length) {
  std::vector<int> conn;
  if (slot == ConnectiveSlot::kMask) {
    conn.push_back(Vocab::kMask);
  } else if (slot == ConnectiveSlot::kConnective && connective) {
    conn = vocab.Ids(corpus::Tokenize(*connective));
  }
  std::size_t n1 = arg1.size(), n2 = arg2.size();
  const std::size_t fixed = 2 + conn.size();
  if (fixed + std::min<std::size_t>(n1, 1) + std::min<std::size_t>(n2, 1) >
      static_cast<std::size_t>(max_length)) {
    throw DataError("input cannot fit in max_input_length " +
                    std::to_string(max_length));
  }
  while (fixed + n1 + n2 > static_cast<std::size_t>(max_length)) {
    if (n2 >= n1 && n2 > 1) {
      --n2;
    } else {
      --n1;
    }
  }
  PackedInput p;
  p.ids.reserve(fixed + n1 + n2);
  p.ids.push_back(Vocab::kBos);
  for (std::size_t i = 0; i < n1; ++i) p.ids.push_back(vocab.Id(arg1[i]));
  if (!conn.empty()) {
    p.connective_position = static_cast<int>(p.ids.size());
    p.connective_length = static_cast<int>(conn.size());
    p.ids.insert(p.ids.end(), conn.begin(), conn.end());
  }
  for (std::size_t i = 0; i < n2; ++i) p.ids.push_back(vocab.Id(arg2[i]));
  p.ids.push_back(Vocab::kEos);
  return p;
}

}  // namespace connshift::encoder
