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

#include "plm/heads.h"

#include <algorithm>
#include <cmath>

#include "plm/errors.h"

namespace plm {

namespace {

void FillNormal(Matrix *m, double stddev, std::mt19937_64 &rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (double &v : m->values()) v = dist(rng);
}

void AppendRow(const Matrix &m, int row, std::vector<double> *out) {
  std::span<const double> values = m.row_span(row);
  out->insert(out->end(), values.begin(), values.end());
}

void AddClassifierTensors(const std::string &prefix, Classifier *cls,
                          std::vector<NamedTensor> *out) {
  if (cls->empty()) return;
  out->push_back({prefix + ".w1", &cls->w1});
  out->push_back({prefix + ".b1", &cls->b1});
  out->push_back({prefix + ".w2", &cls->w2});
  out->push_back({prefix + ".b2", &cls->b2});
}

}  // namespace

std::string ToString(NerMode mode) {
  switch (mode) {
    case NerMode::kMarkerOnly:
      return "marker_only";
    case NerMode::kMarkerPlusTconcat:
      return "marker_plus_tconcat";
    case NerMode::kTconcatOnly:
      return "tconcat_only";
  }
  return "?";
}

NerMode ParseNerMode(const std::string &name) {
  if (name == "marker_only") return NerMode::kMarkerOnly;
  if (name == "marker_plus_tconcat") return NerMode::kMarkerPlusTconcat;
  if (name == "tconcat_only") return NerMode::kTconcatOnly;
  throw ConfigError("unknown NER mode '" + name + "'");
}

int NerInputDim(NerMode mode, int hidden_dim) {
  return mode == NerMode::kMarkerPlusTconcat ? 4 * hidden_dim : 2 * hidden_dim;
}

Classifier MakeClassifier(int input_dim, int hidden_dim, int output_dim,
                          std::mt19937_64 &rng) {
  Classifier cls;
  cls.w1 = Matrix(input_dim, hidden_dim);
  cls.b1 = Matrix(1, hidden_dim);
  cls.w2 = Matrix(hidden_dim, output_dim);
  cls.b2 = Matrix(1, output_dim);
  FillNormal(&cls.w1, 1.0 / std::sqrt(static_cast<double>(input_dim)), rng);
  FillNormal(&cls.w2, 1.0 / std::sqrt(static_cast<double>(hidden_dim)), rng);
  return cls;
}

std::vector<double> ClassifierForward(const Classifier &cls,
                                      std::span<const double> input,
                                      ClassifierCache *cache) {
  if (static_cast<int>(input.size()) != cls.input_dim()) {
    throw ConfigError("classifier expects " + std::to_string(cls.input_dim()) +
                      " inputs, got " + std::to_string(input.size()));
  }
  const int hidden_dim = cls.w1.cols();
  std::vector<double> hidden(cls.b1.row(0), cls.b1.row(0) + hidden_dim);
  for (size_t k = 0; k < input.size(); ++k) {
    const double x = input[k];
    const double *w = cls.w1.row(static_cast<int>(k));
    for (int j = 0; j < hidden_dim; ++j) hidden[j] += x * w[j];
  }
  for (double &h : hidden) h = std::tanh(h);
  const int out_dim = cls.output_dim();
  std::vector<double> logits(cls.b2.row(0), cls.b2.row(0) + out_dim);
  for (int k = 0; k < hidden_dim; ++k) {
    const double *w = cls.w2.row(k);
    for (int j = 0; j < out_dim; ++j) logits[j] += hidden[k] * w[j];
  }
  if (cache != nullptr) {
    cache->input.assign(input.begin(), input.end());
    cache->hidden = std::move(hidden);
  }
  return logits;
}

std::vector<double> ClassifierBackward(const Classifier &cls,
                                       const ClassifierCache &cache,
                                       std::span<const double> d_logits,
                                       Classifier *grads) {
  const int hidden_dim = cls.w1.cols();
  const int out_dim = cls.output_dim();
  std::vector<double> d_hidden(hidden_dim, 0.0);
  for (int k = 0; k < hidden_dim; ++k) {
    const double *w = cls.w2.row(k);
    double *gw = grads->w2.row(k);
    double sum = 0.0;
    for (int j = 0; j < out_dim; ++j) {
      gw[j] += cache.hidden[k] * d_logits[j];
      sum += w[j] * d_logits[j];
    }
    d_hidden[k] = sum * (1.0 - cache.hidden[k] * cache.hidden[k]);
  }
  for (int j = 0; j < out_dim; ++j) grads->b2(0, j) += d_logits[j];
  std::vector<double> d_input(cache.input.size(), 0.0);
  for (size_t i = 0; i < cache.input.size(); ++i) {
    const double *w = cls.w1.row(static_cast<int>(i));
    double *gw = grads->w1.row(static_cast<int>(i));
    double sum = 0.0;
    for (int k = 0; k < hidden_dim; ++k) {
      gw[k] += cache.input[i] * d_hidden[k];
      sum += w[k] * d_hidden[k];
    }
    d_input[i] = sum;
  }
  for (int k = 0; k < hidden_dim; ++k) grads->b1(0, k) += d_hidden[k];
  return d_input;
}

std::vector<NamedTensor> HeadParams::Tensors() {
  std::vector<NamedTensor> out;
  AddClassifierTensors("ner", &ner, &out);
  AddClassifierTensors("stage1", &stage1, &out);
  AddClassifierTensors("re", &re, &out);
  AddClassifierTensors("aux", &aux, &out);
  return out;
}

std::vector<ConstNamedTensor> HeadParams::Tensors() const {
  std::vector<ConstNamedTensor> result;
  for (const NamedTensor &t : const_cast<HeadParams *>(this)->Tensors()) {
    result.push_back({t.name, t.tensor});
  }
  return result;
}

HeadParams HeadParams::ZerosLike() const {
  HeadParams zeros = *this;
  for (NamedTensor &t : zeros.Tensors()) t.tensor->SetZero();
  return zeros;
}

SpanRepr SpanRepresentation(const SlotOutputs &outputs,
                            const EncodingLayout &layout, const Span &span,
                            bool with_tconcat) {
  const int pair = layout.FindPair(span);
  if (pair < 0) {
    throw LookupError("span (" + std::to_string(span.start) + "," +
                      std::to_string(span.end) + ") has no marker pair");
  }
  SpanRepr repr;
  AppendRow(outputs.hidden, layout.pairs[pair].start_slot, &repr.marker);
  AppendRow(outputs.hidden, layout.pairs[pair].end_slot, &repr.marker);
  if (with_tconcat) repr.tconcat = TconcatFeature(outputs, layout, span);
  return repr;
}

std::vector<double> TconcatFeature(const SlotOutputs &outputs,
                                   const EncodingLayout &layout,
                                   const Span &span) {
  const Span local = span.Shifted(-layout.doc_offset);
  const int window = static_cast<int>(layout.token_slots.size());
  if (local.start < 1 || local.end > window) {
    throw LookupError("span (" + std::to_string(span.start) + "," +
                      std::to_string(span.end) + ") lies outside the layout");
  }
  std::vector<double> feature;
  AppendRow(outputs.hidden, layout.token_slots[local.start - 1], &feature);
  AppendRow(outputs.hidden, layout.token_slots[local.end - 1], &feature);
  return feature;
}

std::vector<double> NerFeatures(const SpanRepr &repr, NerMode mode) {
  const bool need_marker = mode != NerMode::kTconcatOnly;
  const bool need_tconcat = mode != NerMode::kMarkerOnly;
  if ((need_marker && repr.marker.empty()) ||
      (need_tconcat && repr.tconcat.empty())) {
    throw ConfigError("span representation lacks the features of mode " +
                      ToString(mode));
  }
  std::vector<double> features;
  if (need_marker) features = repr.marker;
  if (need_tconcat) {
    features.insert(features.end(), repr.tconcat.begin(), repr.tconcat.end());
  }
  return features;
}

std::vector<double> NerLogits(const SpanRepr &repr, const Classifier &cls,
                              NerMode mode) {
  return ClassifierForward(cls, NerFeatures(repr, mode));
}

std::vector<double> PairRepresentation(const SlotOutputs &outputs,
                                       const EncodingLayout &layout,
                                       const Span &object) {
  if (layout.kind != LayoutKind::kPair || layout.subject_start_slot < 0 ||
      layout.subject_end_slot < 0) {
    throw LayoutError("pair representation needs a layout with solid markers");
  }
  const int pair = layout.FindPair(object);
  if (pair < 0) {
    throw LookupError("object (" + std::to_string(object.start) + "," +
                      std::to_string(object.end) + ") has no marker pair");
  }
  std::vector<double> repr;
  AppendRow(outputs.hidden, layout.subject_start_slot, &repr);
  AppendRow(outputs.hidden, layout.subject_end_slot, &repr);
  AppendRow(outputs.hidden, layout.pairs[pair].start_slot, &repr);
  AppendRow(outputs.hidden, layout.pairs[pair].end_slot, &repr);
  return repr;
}

ReLogits RelationLogits(std::span<const double> pair_repr,
                        const HeadParams &heads) {
  return {ClassifierForward(heads.re, pair_repr),
          ClassifierForward(heads.aux, pair_repr)};
}

std::vector<double> Softmax(std::span<const double> logits) {
  std::vector<double> probs(logits.begin(), logits.end());
  if (probs.empty()) return probs;
  const double max_logit = *std::max_element(probs.begin(), probs.end());
  double total = 0.0;
  for (double &p : probs) {
    p = std::exp(p - max_logit);
    total += p;
  }
  for (double &p : probs) p /= total;
  return probs;
}

int Argmax(std::span<const double> values) {
  return static_cast<int>(std::max_element(values.begin(), values.end()) -
                          values.begin());
}

BidirectionalScores CombineBidirectional(std::span<const double> forward,
                                         std::span<const double> inverse,
                                         const DirectedLabelSpace &space) {
  const size_t n = static_cast<size_t>(space.size());
  if (forward.size() != n || inverse.size() != n) {
    throw ConfigError("bidirectional logits do not match the label space (" +
                      std::to_string(forward.size()) + ", " +
                      std::to_string(inverse.size()) + " vs " +
                      std::to_string(n) + ")");
  }
  const std::vector<double> pf = Softmax(forward);
  const std::vector<double> pi = Softmax(inverse);
  BidirectionalScores result;
  result.scores.resize(n);
  for (size_t l = 0; l < n; ++l) {
    result.scores[l] = pf[l] + pi[space.inverse_of(static_cast<int>(l))];
  }
  result.label = Argmax(result.scores);
  return result;
}

double CrossEntropy(std::span<const double> logits, int gold,
                    std::vector<double> *d_logits) {
  if (gold < 0 || gold >= static_cast<int>(logits.size())) {
    throw DataError("gold label " + std::to_string(gold) +
                    " out of range for " + std::to_string(logits.size()) +
                    " classes");
  }
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double l : logits) total += std::exp(l - max_logit);
  const double log_z = max_logit + std::log(total);
  if (d_logits != nullptr) {
    d_logits->resize(logits.size());
    for (size_t i = 0; i < logits.size(); ++i) {
      (*d_logits)[i] = std::exp(logits[i] - log_z);
    }
    (*d_logits)[gold] -= 1.0;
  }
  return log_z - logits[gold];
}

double NerTrainingLoss(std::span<const NerTarget> targets) {
  if (targets.empty()) return 0.0;
  double total = 0.0;
  for (const NerTarget &t : targets) total += CrossEntropy(t.logits, t.gold);
  return total / static_cast<double>(targets.size());
}

double ReTrainingLoss(std::span<const ReTarget> targets, double aux_weight) {
  if (aux_weight < 0) throw ConfigError("aux_weight must be non-negative");
  if (targets.empty()) return 0.0;
  double total = 0.0;
  for (const ReTarget &t : targets) {
    total += CrossEntropy(t.relation_logits, t.gold_relation);
    if (aux_weight > 0) {
      total += aux_weight *
               CrossEntropy(t.object_type_logits, t.gold_object_type);
    }
  }
  return total / static_cast<double>(targets.size());
}

}  // namespace plm
