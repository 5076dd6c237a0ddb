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

#include "plm/encoder.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "plm/errors.h"

namespace plm {

namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr double kGeluCoeff = 0.044715;
const double kSqrt2OverPi = std::sqrt(2.0 / M_PI);

void FillNormal(Matrix *m, double stddev, std::mt19937_64 &rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (double &v : m->values()) v = dist(rng);
}

void LayerNormForward(const Matrix &x, const Matrix &gain, const Matrix &bias,
                      Matrix *norm, Matrix *out, std::vector<double> *inv_std) {
  const int d = x.cols();
  *norm = Matrix(x.rows(), d);
  *out = Matrix(x.rows(), d);
  inv_std->assign(x.rows(), 0.0);
  for (int r = 0; r < x.rows(); ++r) {
    const double *src = x.row(r);
    double mean = 0.0;
    for (int c = 0; c < d; ++c) mean += src[c];
    mean /= d;
    double var = 0.0;
    for (int c = 0; c < d; ++c) var += (src[c] - mean) * (src[c] - mean);
    var /= d;
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    (*inv_std)[r] = inv;
    double *n = norm->row(r);
    double *o = out->row(r);
    for (int c = 0; c < d; ++c) {
      n[c] = (src[c] - mean) * inv;
      o[c] = n[c] * gain(0, c) + bias(0, c);
    }
  }
}

// Returns d(loss)/dx given d(loss)/d(out).
Matrix LayerNormBackward(const Matrix &d_out, const Matrix &norm,
                         const std::vector<double> &inv_std,
                         const Matrix &gain, Matrix *d_gain, Matrix *d_bias) {
  const int d = d_out.cols();
  Matrix dx(d_out.rows(), d);
  std::vector<double> d_norm(d);
  for (int r = 0; r < d_out.rows(); ++r) {
    const double *g = d_out.row(r);
    const double *n = norm.row(r);
    double mean_dn = 0.0;
    double mean_dn_n = 0.0;
    for (int c = 0; c < d; ++c) {
      (*d_gain)(0, c) += g[c] * n[c];
      (*d_bias)(0, c) += g[c];
      d_norm[c] = g[c] * gain(0, c);
      mean_dn += d_norm[c];
      mean_dn_n += d_norm[c] * n[c];
    }
    mean_dn /= d;
    mean_dn_n /= d;
    double *out = dx.row(r);
    for (int c = 0; c < d; ++c) {
      out[c] = inv_std[r] * (d_norm[c] - mean_dn - n[c] * mean_dn_n);
    }
  }
  return dx;
}

double Gelu(double x) {
  const double t = std::tanh(kSqrt2OverPi * (x + kGeluCoeff * x * x * x));
  return 0.5 * x * (1.0 + t);
}

double GeluGrad(double x) {
  const double t = std::tanh(kSqrt2OverPi * (x + kGeluCoeff * x * x * x));
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * kSqrt2OverPi *
                               (1.0 + 3.0 * kGeluCoeff * x * x);
}

Matrix Linear(const Matrix &x, const Matrix &w, const Matrix &b) {
  Matrix out = MatMul(x, w);
  AddRowBias(b, &out);
  return out;
}

// Gradient of a linear map y = x w + b. Returns dx.
Matrix LinearBackward(const Matrix &x, const Matrix &w, const Matrix &dy,
                      Matrix *dw, Matrix *db) {
  AddMatMulTransA(x, dy, dw);
  AddColumnSums(dy, db);
  return MatMulTransB(dy, w);
}

void CheckFinite(const Matrix &m, int layer) {
  if (!AllFinite(m)) {
    throw NumericError("non-finite activation in encoder layer " +
                       std::to_string(layer));
  }
}

}  // namespace

void EncoderConfig::Validate() const {
  auto positive = [](int value, const char *name) {
    if (value <= 0) {
      throw ConfigError(std::string(name) + " must be positive, got " +
                        std::to_string(value));
    }
  };
  positive(vocab_size, "vocab_size");
  positive(hidden_dim, "hidden_dim");
  positive(num_heads, "num_heads");
  positive(ffn_dim, "ffn_dim");
  positive(max_position, "max_position");
  positive(max_slots, "max_slots");
  if (num_layers < 0) throw ConfigError("num_layers must be non-negative");
  if (hidden_dim % num_heads != 0) {
    throw ConfigError("hidden_dim " + std::to_string(hidden_dim) +
                      " is not divisible by num_heads " +
                      std::to_string(num_heads));
  }
}

std::vector<NamedTensor> EncoderParams::Tensors() {
  std::vector<NamedTensor> tensors = {{"token_embedding", &token_embedding},
                                      {"position_embedding", &position_embedding}};
  for (size_t l = 0; l < layers.size(); ++l) {
    LayerParams &p = layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    for (auto [name, tensor] :
         std::initializer_list<std::pair<const char *, Matrix *>>{
             {"ln1_gain", &p.ln1_gain}, {"ln1_bias", &p.ln1_bias},
             {"wq", &p.wq},             {"bq", &p.bq},
             {"wk", &p.wk},             {"bk", &p.bk},
             {"wv", &p.wv},             {"bv", &p.bv},
             {"wo", &p.wo},             {"bo", &p.bo},
             {"ln2_gain", &p.ln2_gain}, {"ln2_bias", &p.ln2_bias},
             {"w1", &p.w1},             {"b1", &p.b1},
             {"w2", &p.w2},             {"b2", &p.b2}}) {
      tensors.push_back({prefix + name, tensor});
    }
  }
  return tensors;
}

std::vector<ConstNamedTensor> EncoderParams::Tensors() const {
  std::vector<ConstNamedTensor> result;
  for (const NamedTensor &t : const_cast<EncoderParams *>(this)->Tensors()) {
    result.push_back({t.name, t.tensor});
  }
  return result;
}

EncoderParams EncoderParams::ZerosLike() const {
  EncoderParams zeros = *this;
  for (NamedTensor &t : zeros.Tensors()) t.tensor->SetZero();
  return zeros;
}

size_t EncoderParams::num_values() const {
  size_t total = 0;
  for (const ConstNamedTensor &t : Tensors()) total += t.tensor->size();
  return total;
}

EncoderParams InitParams(const EncoderConfig &config) {
  config.Validate();
  const int d = config.hidden_dim;
  const int f = config.ffn_dim;
  std::mt19937_64 rng(config.seed);
  EncoderParams params;
  params.config = config;
  params.token_embedding = Matrix(config.vocab_size, d);
  params.position_embedding = Matrix(config.max_position, d);
  FillNormal(&params.token_embedding, 0.5, rng);
  // Sinusoidal start; rows stay trainable.
  for (int p = 0; p < config.max_position; ++p) {
    for (int i = 0; i < d; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(i / 2 * 2) / d);
      params.position_embedding(p, i) =
          i % 2 == 0 ? std::sin((p + 1) * freq) : std::cos((p + 1) * freq);
    }
  }
  const double residual_scale =
      1.0 / std::sqrt(2.0 * std::max(1, config.num_layers));
  for (int l = 0; l < config.num_layers; ++l) {
    LayerParams p;
    p.ln1_gain = Matrix(1, d, 1.0);
    p.ln1_bias = Matrix(1, d);
    p.ln2_gain = Matrix(1, d, 1.0);
    p.ln2_bias = Matrix(1, d);
    p.wq = Matrix(d, d);
    p.wk = Matrix(d, d);
    p.wv = Matrix(d, d);
    p.wo = Matrix(d, d);
    p.w1 = Matrix(d, f);
    p.w2 = Matrix(f, d);
    p.bq = Matrix(1, d);
    p.bk = Matrix(1, d);
    p.bv = Matrix(1, d);
    p.bo = Matrix(1, d);
    p.b1 = Matrix(1, f);
    p.b2 = Matrix(1, d);
    const double in_scale = 1.0 / std::sqrt(static_cast<double>(d));
    FillNormal(&p.wq, in_scale, rng);
    FillNormal(&p.wk, in_scale, rng);
    FillNormal(&p.wv, in_scale, rng);
    FillNormal(&p.wo, in_scale * residual_scale, rng);
    FillNormal(&p.w1, in_scale, rng);
    FillNormal(&p.w2, residual_scale / std::sqrt(static_cast<double>(f)), rng);
    params.layers.push_back(std::move(p));
  }
  return params;
}

EncoderParams PromptInitMarkers(EncoderParams params,
                                const std::map<int, int> &marker_to_word) {
  const int vocab = params.token_embedding.rows();
  for (const auto &[marker, word] : marker_to_word) {
    if (marker < 0 || marker >= vocab || word < 0 || word >= vocab) {
      throw ConfigError("prompt initialization id out of range: " +
                        std::to_string(marker) + " -> " + std::to_string(word));
    }
    if (marker == word) continue;
    std::span<const double> src = params.token_embedding.row_span(word);
    std::span<double> dst = params.token_embedding.row_span(marker);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return params;
}

SlotOutputs Encode(const EncoderParams &params, const EncodingLayout &layout) {
  std::vector<Violation> violations = ValidateLayout(layout);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "invalid layout (" << violations.size() << " violations)";
    for (size_t i = 0; i < violations.size() && i < 5; ++i) {
      msg << "; slots " << violations[i].slot_i << "," << violations[i].slot_j
          << ": " << violations[i].rule;
    }
    throw LayoutError(msg.str());
  }
  EncoderCache cache;
  return Forward(params, layout, &cache);
}

SlotOutputs Forward(const EncoderParams &params, const EncodingLayout &layout,
                    EncoderCache *cache) {
  const EncoderConfig &config = params.config;
  const int n = layout.num_slots();
  const int d = config.hidden_dim;
  const int heads = config.num_heads;
  const int dh = config.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  if (n > config.max_slots) {
    throw OverflowError("layout has " + std::to_string(n) +
                        " slots, encoder limit is " +
                        std::to_string(config.max_slots));
  }

  EncoderCache scratch;
  if (cache == nullptr) cache = &scratch;
  cache->token_ids = layout.slot_token_ids;
  cache->position_ids = layout.slot_position_ids;
  cache->visible.assign(n, {});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (layout.visible(i, j)) cache->visible[i].push_back(j);
    }
  }

  Matrix x(n, d);
  for (int i = 0; i < n; ++i) {
    const int token = layout.slot_token_ids[i];
    const int position = layout.slot_position_ids[i];
    if (token < 0 || token >= config.vocab_size) {
      throw LayoutError("slot " + std::to_string(i) + " has token id " +
                        std::to_string(token) + " outside the vocabulary");
    }
    if (position < 1 || position > config.max_position) {
      throw LayoutError("slot " + std::to_string(i) + " has position id " +
                        std::to_string(position) + " beyond max_position " +
                        std::to_string(config.max_position));
    }
    const double *te = params.token_embedding.row(token);
    const double *pe = params.position_embedding.row(position - 1);
    double *dst = x.row(i);
    for (int c = 0; c < d; ++c) dst[c] = te[c] + pe[c];
  }

  cache->layers.assign(config.num_layers, {});
  for (int l = 0; l < config.num_layers; ++l) {
    const LayerParams &p = params.layers[l];
    LayerCache &lc = cache->layers[l];
    lc.input = x;
    LayerNormForward(x, p.ln1_gain, p.ln1_bias, &lc.ln1_norm, &lc.ln1_out,
                     &lc.ln1_inv_std);
    lc.q = Linear(lc.ln1_out, p.wq, p.bq);
    lc.k = Linear(lc.ln1_out, p.wk, p.bk);
    lc.v = Linear(lc.ln1_out, p.wv, p.bv);
    lc.context = Matrix(n, d);
    lc.weights.assign(heads, std::vector<std::vector<double>>(n));
    for (int h = 0; h < heads; ++h) {
      const int off = h * dh;
      for (int i = 0; i < n; ++i) {
        const std::vector<int> &vis = cache->visible[i];
        std::vector<double> &w = lc.weights[h][i];
        w.resize(vis.size());
        const double *qi = lc.q.row(i) + off;
        double max_score = -INFINITY;
        for (size_t t = 0; t < vis.size(); ++t) {
          const double *kj = lc.k.row(vis[t]) + off;
          double s = 0.0;
          for (int c = 0; c < dh; ++c) s += qi[c] * kj[c];
          w[t] = s * scale;
          max_score = std::max(max_score, w[t]);
        }
        double total = 0.0;
        for (double &s : w) {
          s = std::exp(s - max_score);
          total += s;
        }
        double *ctx = lc.context.row(i) + off;
        for (size_t t = 0; t < vis.size(); ++t) {
          w[t] /= total;
          const double *vj = lc.v.row(vis[t]) + off;
          for (int c = 0; c < dh; ++c) ctx[c] += w[t] * vj[c];
        }
      }
    }
    Matrix attn_out = Linear(lc.context, p.wo, p.bo);
    lc.mid = x;
    AddInPlace(attn_out, &lc.mid);
    LayerNormForward(lc.mid, p.ln2_gain, p.ln2_bias, &lc.ln2_norm, &lc.ln2_out,
                     &lc.ln2_inv_std);
    lc.ffn_pre = Linear(lc.ln2_out, p.w1, p.b1);
    lc.ffn_act = lc.ffn_pre;
    for (double &v : lc.ffn_act.values()) v = Gelu(v);
    Matrix ffn_out = Linear(lc.ffn_act, p.w2, p.b2);
    x = lc.mid;
    AddInPlace(ffn_out, &x);
    CheckFinite(x, l);
  }
  return SlotOutputs{std::move(x)};
}

void Backward(const EncoderParams &params, const EncoderCache &cache,
              const Matrix &d_hidden, EncoderParams *grads) {
  const EncoderConfig &config = params.config;
  const int n = d_hidden.rows();
  const int heads = config.num_heads;
  const int dh = config.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Matrix dx = d_hidden;
  for (int l = config.num_layers - 1; l >= 0; --l) {
    const LayerParams &p = params.layers[l];
    LayerParams &g = grads->layers[l];
    const LayerCache &lc = cache.layers[l];

    // Feed-forward branch: x = mid + W2 gelu(W1 ln2(mid)).
    Matrix d_act = LinearBackward(lc.ffn_act, p.w2, dx, &g.w2, &g.b2);
    Matrix d_pre = d_act;
    {
      std::span<double> dp = d_pre.values();
      std::span<const double> pre = lc.ffn_pre.values();
      for (size_t i = 0; i < dp.size(); ++i) dp[i] *= GeluGrad(pre[i]);
    }
    Matrix d_ln2 = LinearBackward(lc.ln2_out, p.w1, d_pre, &g.w1, &g.b1);
    Matrix d_mid = LayerNormBackward(d_ln2, lc.ln2_norm, lc.ln2_inv_std,
                                     p.ln2_gain, &g.ln2_gain, &g.ln2_bias);
    AddInPlace(dx, &d_mid);

    // Attention branch: mid = input + Wo attn(ln1(input)).
    Matrix d_context = LinearBackward(lc.context, p.wo, d_mid, &g.wo, &g.bo);
    Matrix dq(n, config.hidden_dim);
    Matrix dk(n, config.hidden_dim);
    Matrix dv(n, config.hidden_dim);
    std::vector<double> d_weight;
    for (int h = 0; h < heads; ++h) {
      const int off = h * dh;
      for (int i = 0; i < n; ++i) {
        const std::vector<int> &vis = cache.visible[i];
        const std::vector<double> &w = lc.weights[h][i];
        const double *dctx = d_context.row(i) + off;
        d_weight.assign(vis.size(), 0.0);
        double weighted = 0.0;
        for (size_t t = 0; t < vis.size(); ++t) {
          const double *vj = lc.v.row(vis[t]) + off;
          double *dvj = dv.row(vis[t]) + off;
          double dw = 0.0;
          for (int c = 0; c < dh; ++c) {
            dw += dctx[c] * vj[c];
            dvj[c] += w[t] * dctx[c];
          }
          d_weight[t] = dw;
          weighted += w[t] * dw;
        }
        const double *qi = lc.q.row(i) + off;
        double *dqi = dq.row(i) + off;
        for (size_t t = 0; t < vis.size(); ++t) {
          const double ds = w[t] * (d_weight[t] - weighted) * scale;
          if (ds == 0.0) continue;
          const double *kj = lc.k.row(vis[t]) + off;
          double *dkj = dk.row(vis[t]) + off;
          for (int c = 0; c < dh; ++c) {
            dqi[c] += ds * kj[c];
            dkj[c] += ds * qi[c];
          }
        }
      }
    }
    Matrix d_ln1 = LinearBackward(lc.ln1_out, p.wq, dq, &g.wq, &g.bq);
    AddInPlace(LinearBackward(lc.ln1_out, p.wk, dk, &g.wk, &g.bk), &d_ln1);
    AddInPlace(LinearBackward(lc.ln1_out, p.wv, dv, &g.wv, &g.bv), &d_ln1);
    dx = LayerNormBackward(d_ln1, lc.ln1_norm, lc.ln1_inv_std, p.ln1_gain,
                           &g.ln1_gain, &g.ln1_bias);
    AddInPlace(d_mid, &dx);
  }

  for (int i = 0; i < n; ++i) {
    const double *src = dx.row(i);
    double *te = grads->token_embedding.row(cache.token_ids[i]);
    double *pe = grads->position_embedding.row(cache.position_ids[i] - 1);
    for (int c = 0; c < config.hidden_dim; ++c) {
      te[c] += src[c];
      pe[c] += src[c];
    }
  }
}

Matrix AttentionMatrix(const EncoderCache &cache, int layer, int head) {
  const int n = static_cast<int>(cache.visible.size());
  Matrix dense(n, n);
  const LayerCache &lc = cache.layers.at(layer);
  for (int i = 0; i < n; ++i) {
    const std::vector<int> &vis = cache.visible[i];
    for (size_t t = 0; t < vis.size(); ++t) {
      dense(i, vis[t]) = lc.weights.at(head)[i][t];
    }
  }
  return dense;
}

}  // namespace plm
