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

#include "connshift/encoder/transformer.h"

#include <cmath>

#include "connshift/error.h"

namespace connshift::encoder {

using nn::Matrix;
using nn::Parameter;
using nn::Var;

nn::Matrix RandomMatrix(int rows, int cols, double stddev, nn::Rng& rng) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.Normal(0.0, stddev);
  }
  return m;
}

namespace {

Parameter Weight(std::string name, int in, int out, nn::Rng& rng) {
  return Parameter(std::move(name), RandomMatrix(in, out, 1.0 / std::sqrt(in), rng));
}
Parameter Bias(std::string name, int n) {
  return Parameter(std::move(name), Matrix::Zero(1, n), /*apply_decay=*/false);
}
Parameter Gain(std::string name, int n) {
  return Parameter(std::move(name), Matrix::Ones(1, n), /*apply_decay=*/false);
}

}  // namespace

TransformerEncoder::TransformerEncoder(const EncoderSpec& spec, int vocab_size,
                                       nn::Rng& rng)
    : spec_(spec) {
  const int d = spec.hidden_dim;
  if (d <= 0 || spec.num_heads <= 0 || d % spec.num_heads != 0) {
    throw ConfigError("hidden_dim must be a positive multiple of num_heads");
  }
  token_embedding_ =
      Parameter("token_embedding", RandomMatrix(vocab_size, d, 1.0, rng));
  position_embedding_ = Parameter(
      "position_embedding", RandomMatrix(spec.max_positions, d, 0.1, rng));
  emb_ln_gain_ = Gain("emb_ln_gain", d);
  emb_ln_bias_ = Bias("emb_ln_bias", d);
  for (int l = 0; l < spec.num_layers; ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    Layer layer{
        Weight(p + "wq", d, d, rng),   Bias(p + "bq", d),
        Weight(p + "wk", d, d, rng),   Bias(p + "bk", d),
        Weight(p + "wv", d, d, rng),   Bias(p + "bv", d),
        Weight(p + "wo", d, d, rng),   Bias(p + "bo", d),
        Gain(p + "ln1_gain", d),       Bias(p + "ln1_bias", d),
        Weight(p + "w1", d, spec.ffn_dim, rng), Bias(p + "b1", spec.ffn_dim),
        Weight(p + "w2", spec.ffn_dim, d, rng), Bias(p + "b2", d),
        Gain(p + "ln2_gain", d),       Bias(p + "ln2_bias", d)};
    layers_.push_back(std::move(layer));
  }
}

Var TransformerEncoder::TokenEmbeddings(nn::Tape& tape,
                                        std::span<const int> ids) const {
  return tape.Gather(token_embedding_, ids);
}

Var TransformerEncoder::Encode(nn::Tape& tape, Var token_embeddings) const {
  const int length = static_cast<int>(token_embeddings.rows());
  if (length > spec_.max_positions) {
    throw DataError("sequence of length " + std::to_string(length) +
                    " exceeds max_positions");
  }
  std::vector<int> positions(length);
  for (int i = 0; i < length; ++i) positions[i] = i;
  Var x = nn::Add(token_embeddings, tape.Gather(position_embedding_, positions));
  x = nn::LayerNorm(x, tape.Param(emb_ln_gain_), tape.Param(emb_ln_bias_));
  for (const auto& layer : layers_) x = LayerForward(tape, layer, x);
  return x;
}

Var TransformerEncoder::LayerForward(nn::Tape& tape, const Layer& layer,
                                         Var x) const {
  const int d = spec_.hidden_dim;
  const int heads = spec_.num_heads;
  const int dh = d / heads;
  Var q = nn::AddRow(nn::MatMul(x, tape.Param(layer.wq)), tape.Param(layer.bq));
  Var k = nn::AddRow(nn::MatMul(x, tape.Param(layer.wk)), tape.Param(layer.bk));
  Var v = nn::AddRow(nn::MatMul(x, tape.Param(layer.wv)), tape.Param(layer.bv));
  std::vector<Var> contexts;
  contexts.reserve(heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  for (int h = 0; h < heads; ++h) {
    Var qh = nn::Cols(q, h * dh, dh);
    Var kh = nn::Cols(k, h * dh, dh);
    Var vh = nn::Cols(v, h * dh, dh);
    Var attn = nn::SoftmaxRows(nn::Scale(nn::MatMulTransposed(qh, kh), scale));
    contexts.push_back(nn::MatMul(attn, vh));
  }
  Var context = nn::ConcatCols(contexts);
  Var attn_out =
      nn::AddRow(nn::MatMul(context, tape.Param(layer.wo)), tape.Param(layer.bo));
  Var h1 = nn::LayerNorm(nn::Add(x, attn_out), tape.Param(layer.ln1_gain),
                         tape.Param(layer.ln1_bias));
  Var ff = nn::Gelu(
      nn::AddRow(nn::MatMul(h1, tape.Param(layer.w1)), tape.Param(layer.b1)));
  ff = nn::AddRow(nn::MatMul(ff, tape.Param(layer.w2)), tape.Param(layer.b2));
  return nn::LayerNorm(nn::Add(h1, ff), tape.Param(layer.ln2_gain),
                       tape.Param(layer.ln2_bias));
}

std::vector<Parameter*> TransformerEncoder::Parameters() {
  std::vector<Parameter*> out = {&token_embedding_, &position_embedding_,
                                 &emb_ln_gain_, &emb_ln_bias_};
  for (auto& l : layers_) {
    for (Parameter* p :
         {&l.wq, &l.bq, &l.wk, &l.bk, &l.wv, &l.bv, &l.wo, &l.bo, &l.ln1_gain,
          &l.ln1_bias, &l.w1, &l.b1, &l.w2, &l.b2, &l.ln2_gain, &l.ln2_bias}) {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<const Parameter*> TransformerEncoder::Parameters() const {
  auto mutable_params = const_cast<TransformerEncoder*>(this)->Parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

}  // namespace connshift::encoder
