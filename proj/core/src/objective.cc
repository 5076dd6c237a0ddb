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

#include "plm/objective.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "plm/errors.h"

namespace plm {

namespace {

void AddToRow(std::span<const double> values, int row, Matrix *m) {
  double *dst = m->row(row);
  for (size_t c = 0; c < values.size(); ++c) dst[c] += values[c];
}

// Runs one classifier on `features`, adds weight * CE to the loss and, when
// `grads` is set, pushes the gradient back into the feature vector.
double ClassifierLoss(const Classifier &cls, Classifier *cls_grad,
                      std::span<const double> features, int gold,
                      double weight, double norm,
                      std::vector<double> *d_features) {
  ClassifierCache cache;
  const std::vector<double> logits = ClassifierForward(cls, features, &cache);
  std::vector<double> d_logits;
  const double loss =
      CrossEntropy(logits, gold, cls_grad != nullptr ? &d_logits : nullptr);
  if (cls_grad != nullptr) {
    for (double &g : d_logits) g *= weight / norm;
    std::vector<double> d_in =
        ClassifierBackward(cls, cache, d_logits, cls_grad);
    for (size_t i = 0; i < d_in.size(); ++i) (*d_features)[i] += d_in[i];
  }
  return weight * loss;
}

double NerInstanceLoss(const EncoderParams &params, const HeadParams &heads,
                       const NerInstance &instance, double norm,
                       LossAndGradient *out) {
  const EncodingLayout &layout = instance.layout;
  if (instance.labels.size() != layout.pairs.size()) {
    throw DataError("NER instance has " +
                    std::to_string(instance.labels.size()) + " labels for " +
                    std::to_string(layout.pairs.size()) + " marker pairs");
  }
  EncoderCache cache;
  const SlotOutputs outputs = Forward(params, layout, &cache);
  const int d = params.config.hidden_dim;
  const bool with_grad = out != nullptr;
  Matrix d_hidden = with_grad ? outputs.hidden.ZerosLike() : Matrix();
  double total = 0.0;
  for (size_t p = 0; p < layout.pairs.size(); ++p) {
    const MarkerPair &pair = layout.pairs[p];
    const SpanRepr repr = SpanRepresentation(
        outputs, layout, pair.span,
        heads.ner_mode != NerMode::kMarkerOnly || !heads.stage1.empty());
    const Span local = pair.span.Shifted(-layout.doc_offset);
    const int slot_a = layout.token_slots[local.start - 1];
    const int slot_b = layout.token_slots[local.end - 1];

    // Scatters a feature gradient laid out as [marker? ; tconcat?].
    auto scatter = [&](const std::vector<double> &g, bool marker,
                       bool tconcat) {
      std::span<const double> rest(g);
      if (marker) {
        AddToRow(rest.subspan(0, d), pair.start_slot, &d_hidden);
        AddToRow(rest.subspan(d, d), pair.end_slot, &d_hidden);
        rest = rest.subspan(2 * d);
      }
      if (tconcat) {
        AddToRow(rest.subspan(0, d), slot_a, &d_hidden);
        AddToRow(rest.subspan(d, d), slot_b, &d_hidden);
      }
    };

    const std::vector<double> features = NerFeatures(repr, heads.ner_mode);
    std::vector<double> d_features(features.size(), 0.0);
    total += ClassifierLoss(heads.ner, with_grad ? &out->head_grad.ner : nullptr,
                            features, instance.labels[p], 1.0, norm,
                            &d_features);
    if (with_grad) {
      scatter(d_features, heads.ner_mode != NerMode::kTconcatOnly,
              heads.ner_mode != NerMode::kMarkerOnly);
    }
    if (!heads.stage1.empty()) {
      std::vector<double> d_tconcat(repr.tconcat.size(), 0.0);
      total += ClassifierLoss(heads.stage1,
                              with_grad ? &out->head_grad.stage1 : nullptr,
                              repr.tconcat, instance.labels[p], 1.0, norm,
                              &d_tconcat);
      if (with_grad) scatter(d_tconcat, false, true);
    }
  }
  if (with_grad) Backward(params, cache, d_hidden, &out->encoder_grad);
  return total;
}

double ReInstanceLoss(const EncoderParams &params, const HeadParams &heads,
                      const ReInstance &instance, double aux_weight,
                      double norm, LossAndGradient *out) {
  const EncodingLayout &layout = instance.layout;
  if (instance.relations.size() != layout.pairs.size() ||
      instance.object_types.size() != layout.pairs.size()) {
    throw DataError("RE instance labels do not match its object pairs");
  }
  EncoderCache cache;
  const SlotOutputs outputs = Forward(params, layout, &cache);
  const int d = params.config.hidden_dim;
  const bool with_grad = out != nullptr;
  Matrix d_hidden = with_grad ? outputs.hidden.ZerosLike() : Matrix();
  double total = 0.0;
  for (size_t p = 0; p < layout.pairs.size(); ++p) {
    const MarkerPair &pair = layout.pairs[p];
    const std::vector<double> repr =
        PairRepresentation(outputs, layout, pair.span);
    std::vector<double> d_repr(repr.size(), 0.0);
    total += ClassifierLoss(heads.re, with_grad ? &out->head_grad.re : nullptr,
                            repr, instance.relations[p], 1.0, norm, &d_repr);
    if (aux_weight > 0) {
      total += ClassifierLoss(heads.aux,
                              with_grad ? &out->head_grad.aux : nullptr, repr,
                              instance.object_types[p], aux_weight, norm,
                              &d_repr);
    }
    if (with_grad) {
      std::span<const double> g(d_repr);
      AddToRow(g.subspan(0, d), layout.subject_start_slot, &d_hidden);
      AddToRow(g.subspan(d, d), layout.subject_end_slot, &d_hidden);
      AddToRow(g.subspan(2 * d, d), pair.start_slot, &d_hidden);
      AddToRow(g.subspan(3 * d, d), pair.end_slot, &d_hidden);
    }
  }
  if (with_grad) Backward(params, cache, d_hidden, &out->encoder_grad);
  return total;
}

double Evaluate(const EncoderParams &params, const HeadParams &heads,
                const TrainingBatch &batch, LossAndGradient *out) {
  if (batch.aux_weight < 0) {
    throw ConfigError("aux_weight must be non-negative");
  }
  const int count = batch.num_targets();
  if (count == 0) return 0.0;
  const double norm = static_cast<double>(count);
  double total = 0.0;
  for (const NerInstance &instance : batch.ner) {
    total += NerInstanceLoss(params, heads, instance, norm, out);
  }
  for (const ReInstance &instance : batch.re) {
    total +=
        ReInstanceLoss(params, heads, instance, batch.aux_weight, norm, out);
  }
  return total / norm;
}

}  // namespace

int TrainingBatch::num_targets() const {
  size_t count = 0;
  for (const NerInstance &instance : ner) count += instance.labels.size();
  for (const ReInstance &instance : re) count += instance.relations.size();
  return static_cast<int>(count);
}

double BatchLoss(const EncoderParams &params, const HeadParams &heads,
                 const TrainingBatch &batch) {
  return Evaluate(params, heads, batch, nullptr);
}

LossAndGradient LossAndGrad(const EncoderParams &params,
                            const HeadParams &heads,
                            const TrainingBatch &batch) {
  LossAndGradient result;
  result.encoder_grad = params.ZerosLike();
  result.head_grad = heads.ZerosLike();
  result.loss = Evaluate(params, heads, batch, &result);
  return result;
}

FiniteDiffReport FiniteDiffCheck(const EncoderParams &params,
                                 const HeadParams &heads,
                                 const TrainingBatch &batch, double epsilon,
                                 int sample, uint64_t seed,
                                 bool include_heads) {
  if (epsilon <= 0) throw ConfigError("epsilon must be positive");
  LossAndGradient analytic = LossAndGrad(params, heads, batch);

  EncoderParams enc = params;
  HeadParams head = heads;
  std::vector<NamedTensor> tensors = enc.Tensors();
  std::vector<NamedTensor> grad_tensors = analytic.encoder_grad.Tensors();
  if (include_heads) {
    for (NamedTensor &t : head.Tensors()) tensors.push_back(t);
    for (NamedTensor &t : analytic.head_grad.Tensors()) {
      grad_tensors.push_back(t);
    }
  }
  std::vector<size_t> offsets;
  size_t total = 0;
  for (const NamedTensor &t : tensors) {
    offsets.push_back(total);
    total += t.tensor->size();
  }

  FiniteDiffReport report;
  // A central difference cannot resolve gradients below the round-off of the
  // loss divided by the step; both sides under it count as zero.
  report.noise_floor = 64.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(analytic.loss)) / epsilon;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, total - 1);
  for (int s = 0; s < sample; ++s) {
    const size_t flat = pick(rng);
    const size_t t = std::upper_bound(offsets.begin(), offsets.end(), flat) -
                     offsets.begin() - 1;
    const size_t index = flat - offsets[t];
    double &value = tensors[t].tensor->values()[index];
    const double saved = value;
    value = saved + epsilon;
    const double plus = BatchLoss(enc, head, batch);
    value = saved - epsilon;
    const double minus = BatchLoss(enc, head, batch);
    value = saved;
    const double numeric = (plus - minus) / (2.0 * epsilon);
    const double exact = grad_tensors[t].tensor->values()[index];
    const double scale = std::max(std::abs(exact), std::abs(numeric));
    ++report.coordinates;
    if (scale <= report.noise_floor) continue;
    ++report.nonzero;
    report.max_relative_error =
        std::max(report.max_relative_error, std::abs(exact - numeric) / scale);
  }
  return report;
}

}  // namespace plm
