// Copyright 2026 The PLM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PLM_ENCODER_H_
#define PLM_ENCODER_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "plm/layout.h"
#include "plm/tensor.h"

namespace plm {

struct EncoderConfig {
  int vocab_size = 0;
  int hidden_dim = 32;
  int num_layers = 2;
  int num_heads = 2;
  int ffn_dim = 64;
  // Largest position id the embedding table can hold.
  int max_position = 512;
  // Largest layout (text + markers) the encoder accepts.
  int max_slots = 4096;
  uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
  int head_dim() const { return hidden_dim / num_heads; }

  friend bool operator==(const EncoderConfig &, const EncoderConfig &) = default;
};

// Pre-LN transformer block.
struct LayerParams {
  Matrix ln1_gain, ln1_bias;
  Matrix wq, bq, wk, bk, wv, bv, wo, bo;
  Matrix ln2_gain, ln2_bias;
  Matrix w1, b1, w2, b2;
};

struct NamedTensor {
  std::string name;
  Matrix *tensor;
};

struct ConstNamedTensor {
  std::string name;
  const Matrix *tensor;
};

struct EncoderParams {
  EncoderConfig config;
  Matrix token_embedding;     // vocab_size x hidden_dim
  Matrix position_embedding;  // max_position x hidden_dim, row p - 1
  std::vector<LayerParams> layers;

  // Every tensor in checkpoint order.
  std::vector<NamedTensor> Tensors();
  std::vector<ConstNamedTensor> Tensors() const;
  // Same shapes, all zeros.
  EncoderParams ZerosLike() const;
  size_t num_values() const;
};

// Seeded initialization; bit-identical for equal configs.
EncoderParams InitParams(const EncoderConfig &config);

// Copies the embedding row of each mapped word onto the marker's row.
// Throws ConfigError for ids out of range.
EncoderParams PromptInitMarkers(EncoderParams params,
                                const std::map<int, int> &marker_to_word);

struct SlotOutputs {
  Matrix hidden;  // |slots| x hidden_dim
};

// Activations kept for the backward pass.
struct LayerCache {
  Matrix input;
  Matrix ln1_norm, ln1_out;
  std::vector<double> ln1_inv_std;
  Matrix q, k, v;
  // weights[h][i][t] is the attention of slot i on its t-th visible slot.
  std::vector<std::vector<std::vector<double>>> weights;
  Matrix context;
  Matrix mid;
  Matrix ln2_norm, ln2_out;
  std::vector<double> ln2_inv_std;
  Matrix ffn_pre, ffn_act;
};

struct EncoderCache {
  std::vector<int> token_ids;
  std::vector<int> position_ids;
  // visible[i] lists the slots i may attend to, ascending.
  std::vector<std::vector<int>> visible;
  std::vector<LayerCache> layers;
};

// Validates the layout (LayoutError listing violations on failure) and runs
// the encoder.
SlotOutputs Encode(const EncoderParams &params, const EncodingLayout &layout);

// Runs the encoder without layout validation. Masked slots are excluded from
// the softmax support. Throws NumericError naming the layer on NaN or Inf.
// `cache` may be null.
SlotOutputs Forward(const EncoderParams &params, const EncodingLayout &layout,
                    EncoderCache *cache = nullptr);

// Accumulates parameter gradients for d(loss)/d(hidden) into `grads`.
void Backward(const EncoderParams &params, const EncoderCache &cache,
              const Matrix &d_hidden, EncoderParams *grads);

// Dense |slots| x |slots| attention matrix of one head, zeros where masked.
Matrix AttentionMatrix(const EncoderCache &cache, int layer, int head);

}  // namespace plm

#endif  // PLM_ENCODER_H_
