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

#include "connshift/harness/synthetic.h"

#include <numeric>

#include "connshift/error.h"
#include "connshift/nn/rng.h"

namespace connshift::harness {

using corpus::DiscourseExample;
using corpus::Modality;
using corpus::Split;

SyntheticOptions SyntheticOptions::Default() {
  SyntheticOptions o;
  o.labels = {{"comparison", 0.25, 0.30, 2},
              {"contingency", 0.25, 0.30, 3},
              {"expansion", 0.25, 0.30, 1},
              {"temporal", 0.25, 0.30, 0}};
  return o;
}

double SyntheticOptions::PlantedShiftRate() const {
  double total = 0.0, shifted = 0.0;
  for (const auto& l : labels) {
    total += l.weight;
    shifted += l.weight * l.shift_rate;
  }
  return total > 0.0 ? shifted / total : 0.0;
}

namespace {

struct Lexicon {
  std::vector<std::vector<std::string>> cues;          // per label
  std::vector<std::vector<std::string>> connectives;   // per label
  std::vector<std::string> filler;
};

Lexicon BuildLexicon(const SyntheticOptions& o, nn::Rng& rng) {
  Lexicon lex;
  const int k = static_cast<int>(o.labels.size());
  lex.cues.resize(k);
  lex.connectives.resize(k);
  for (int l = 0; l < k; ++l) {
    for (int c = 0; c < o.cues_per_label; ++c) {
      lex.cues[l].push_back(o.labels[l].name.substr(0, 3) + "cue" +
                            std::to_string(c));
    }
    for (int c = 0; c < o.connectives_per_label; ++c) {
      std::string surface;
      for (int w = 0; w < o.connective_length; ++w) {
        if (w) surface += ' ';
        surface += lex.cues[l][rng.Index(lex.cues[l].size())];
      }
      bool dup = false;
      for (const auto& s : lex.connectives[l]) dup = dup || s == surface;
      if (dup) {
        --c;
        continue;
      }
      lex.connectives[l].push_back(surface);
    }
  }
  for (int f = 0; f < o.filler_words; ++f) {
    lex.filler.push_back("w" + std::to_string(f));
  }
  return lex;
}

corpus::Tokens Argument(const Lexicon& lex, const SyntheticOptions& o,
                        int cue_label, nn::Rng& rng) {
  const int len = o.min_arg_words +
                  static_cast<int>(rng.Index(o.max_arg_words - o.min_arg_words + 1));
  corpus::Tokens t;
  for (int i = 0; i < len; ++i) t.push_back(lex.filler[rng.Index(lex.filler.size())]);
  if (cue_label >= 0) {
    const auto& cues = lex.cues[cue_label];
    t[rng.Index(t.size())] = cues[rng.Index(cues.size())];
  }
  return t;
}

int SampleLabel(const std::vector<double>& cumulative, nn::Rng& rng) {
  const double u = rng.OpenUniform() * cumulative.back();
  for (std::size_t i = 0; i < cumulative.size(); ++i) {
    if (u < cumulative[i]) return static_cast<int>(i);
  }
  return static_cast<int>(cumulative.size()) - 1;
}

}  // namespace

SyntheticCorpus GenerateSynthetic(const SyntheticOptions& o) {
  const int k = static_cast<int>(o.labels.size());
  if (k < 2) throw ConfigError("synthetic corpus needs at least two labels");
  if (o.cues_per_label < 1 || o.connectives_per_label < 1 ||
      o.connective_length < 1 || o.filler_words < 1 || o.min_arg_words < 1 ||
      o.max_arg_words < o.min_arg_words) {
    throw ConfigError("invalid synthetic vocabulary sizes");
  }
  long distinct = 1;
  for (int w = 0; w < o.connective_length; ++w) distinct *= o.cues_per_label;
  if (distinct < o.connectives_per_label) {
    throw ConfigError("not enough cue words for distinct connectives");
  }
  std::vector<double> cumulative;
  std::vector<std::string> names;
  double acc = 0.0;
  for (const auto& l : o.labels) {
    if (l.weight <= 0.0 || l.shift_rate < 0.0 || l.shift_rate > 1.0 ||
        l.shift_target < 0 || l.shift_target >= k ||
        (l.shift_rate > 0.0 && l.shift_target == &l - o.labels.data())) {
      throw ConfigError("invalid synthetic label '" + l.name + "'");
    }
    acc += l.weight;
    cumulative.push_back(acc);
    names.push_back(l.name);
  }

  nn::Rng rng(o.seed);
  const Lexicon lex = BuildLexicon(o, rng);
  SyntheticCorpus out;
  out.scheme = corpus::LabelScheme("synthetic", corpus::SchemeLevel::kTop, names);

  auto make = [&](bool is_explicit, Split split, int index) {
    DiscourseExample e;
    e.id = std::string(is_explicit ? "exp-" : "imp-") +
           std::string(corpus::ToString(split)) + "-" + std::to_string(index);
    e.split = split;
    e.modality = is_explicit ? Modality::kExplicit : Modality::kImplicit;
    int conn_label, arg_label;
    bool shifted;
    if (is_explicit) {
      conn_label = SampleLabel(cumulative, rng);
      shifted = rng.OpenUniform() < o.labels[conn_label].shift_rate;
      arg_label = shifted ? o.labels[conn_label].shift_target : conn_label;
    } else {
      arg_label = static_cast<int>(rng.Index(k));
      shifted = rng.OpenUniform() < o.implicit_shift_rate;
      conn_label = shifted ? o.labels[arg_label].shift_target : arg_label;
      if (conn_label == arg_label && shifted) shifted = false;
    }
    // The cue sits in either argument.
    const bool cue_in_first = rng.Index(2) == 0;
    e.arg1 = Argument(lex, o, cue_in_first ? arg_label : -1, rng);
    e.arg2 = Argument(lex, o, cue_in_first ? -1 : arg_label, rng);
    const auto& conns = lex.connectives[conn_label];
    e.connective = conns[rng.Index(conns.size())];
    e.relation_top = names[is_explicit ? conn_label : arg_label];
    e.arg_status = rng.Index(2) ? corpus::ArgStatus::kIntraSentential
                                : corpus::ArgStatus::kInterSentential;
    e.conn_syntax = corpus::ConnSyntax::kUnknown;
    if (is_explicit) {
      out.explicit_examples.push_back(std::move(e));
      out.explicit_argument_labels.push_back(names[arg_label]);
      out.explicit_shifted.push_back(shifted);
    } else {
      out.implicit_examples.push_back(std::move(e));
      out.implicit_argument_labels.push_back(names[arg_label]);
      out.implicit_shifted.push_back(shifted);
    }
  };
  const std::pair<Split, int> explicit_sizes[] = {
      {Split::kTrain, o.explicit_train}, {Split::kDev, o.explicit_dev},
      {Split::kTest, o.explicit_test}};
  const std::pair<Split, int> implicit_sizes[] = {
      {Split::kTrain, o.implicit_train}, {Split::kDev, o.implicit_dev},
      {Split::kTest, o.implicit_test}};
  for (auto [split, n] : explicit_sizes) {
    for (int i = 0; i < n; ++i) make(true, split, i);
  }
  for (auto [split, n] : implicit_sizes) {
    for (int i = 0; i < n; ++i) make(false, split, i);
  }
  return out;
}

namespace {

corpus::Corpus Relabel(const corpus::LabelScheme& scheme,
                       std::vector<DiscourseExample> examples,
                       const std::vector<std::string>& labels) {
  for (std::size_t i = 0; i < examples.size(); ++i) {
    examples[i].relation_top = labels[i];
  }
  return corpus::Corpus(scheme, std::move(examples));
}

}  // namespace

corpus::Corpus SyntheticCorpus::ExplicitCorpus() const {
  return corpus::Corpus(scheme, explicit_examples);
}

corpus::Corpus SyntheticCorpus::ImplicitCorpus() const {
  return corpus::Corpus(scheme, implicit_examples);
}

corpus::Corpus SyntheticCorpus::ExplicitByArguments() const {
  return Relabel(scheme, explicit_examples, explicit_argument_labels);
}

corpus::Corpus SyntheticCorpus::ImplicitByArguments() const {
  return Relabel(scheme, implicit_examples, implicit_argument_labels);
}

}  // namespace connshift::harness
