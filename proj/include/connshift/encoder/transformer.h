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

#ifndef CONNSHIFT_ENCODER_TRANSFORMER_H_
#define CONNSHIFT_ENCODER_TRANSFORMER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "connshift/nn/rng.h"
#include "connshift/nn/tape.h"

namespace connshift::encoder {

struct EncoderSpec {
  std::string encoder_id = "tiny-transformer";
  int hidden_dim = 64;
  int num_layers = 2;
  int num_heads = 4;
  int ffn_dim = 128;
  int max_positions = 256;
};

// Post-norm bidirectional transformer encoder (BERT/RoBERTa layout) with
// learned token and position embeddings, randomly initialized.
class TransformerEncoder {
 public:
  TransformerEncoder() = default;
  TransformerEncoder(const EncoderSpec& spec, int vocab_size, nn::Rng& rng);

  const EncoderSpec& spec() const { return spec_; }
  int hidden_dim() const { return spec_.hidden_dim; }

  // Token embedding rows for `ids` (T x hidden).
  nn::Var TokenEmbeddings(nn::Tape& tape, std::span<const int> ids) const;
  // Adds positions, normalizes and runs all layers; returns T x hidden.
  nn::Var Encode(nn::Tape& tape, nn::Var token_embeddings) const;
  nn::Var Forward(nn::Tape& tape, std::span<const int> ids) const {
    return Encode(tape, TokenEmbeddings(tape, ids));
  }

  nn::Parameter& token_embedding() { return token_embedding_; }
  const nn::Parameter& token_embedding() const { return token_embedding_; }

  std::vector<nn::Parameter*> Parameters();
  std::vector<const nn::Parameter*> Parameters() const;

 private:
  struct Layer {
    nn::Parameter wq, bq, wk, bk, wv, bv, wo, bo;
    nn::Parameter ln1_gain, ln1_bias;
    nn::Parameter w1, b1, w2, b2;
    nn::Parameter ln2_gain, ln2_bias;
  };

  nn::Var LayerForward(nn::Tape& tape, const Layer& layer, nn::Var x) const;

  EncoderSpec spec_;
  nn::Parameter token_embedding_;
  nn::Parameter position_embedding_;
  nn::Parameter emb_ln_gain_, emb_ln_bias_;
  std::vector<Layer> layers_;
};

// N(0, stddev) matrix.
nn::Matrix RandomMatrix(int rows, int cols, double stddev, nn::Rng& rng);

}  // namespace connshift::encoder

#endif  // CONNSHIFT_ENCODER_TRANSFORMER_H_
