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

#ifndef PLM_HEADS_H_
#define PLM_HEADS_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "plm/encoder.h"
#include "plm/layout.h"
#include "plm/spanspace.h"
#include "plm/tensor.h"

namespace plm {

// Which span features feed the NER classifier.
enum class NerMode { kMarkerOnly, kMarkerPlusTconcat, kTconcatOnly };

std::string ToString(NerMode mode);
NerMode ParseNerMode(const std::string &name);
// Classifier input width for hidden size `hidden_dim`.
int NerInputDim(NerMode mode, int hidden_dim);

// logits = W2 tanh(W1 x + b1) + b2.
struct Classifier {
  Matrix w1, b1, w2, b2;

  bool empty() const { return w1.empty(); }
  int input_dim() const { return w1.rows(); }
  int output_dim() const { return w2.cols(); }
};

Classifier MakeClassifier(int input_dim, int hidden_dim, int output_dim,
                          std::mt19937_64 &rng);

struct ClassifierCache {
  std::vector<double> input;
  std::vector<double> hidden;
};

std::vector<double> ClassifierForward(const Classifier &cls,
                                      std::span<const double> input,
                                      ClassifierCache *cache = nullptr);
// Accumulates into `grads` and returns d(loss)/d(input).
std::vector<double> ClassifierBackward(const Classifier &cls,
                                       const ClassifierCache &cache,
                                       std::span<const double> d_logits,
                                       Classifier *grads);

struct HeadParams {
  NerMode ner_mode = NerMode::kMarkerPlusTconcat;
  Classifier ner;     // entity types + NONE
  Classifier stage1;  // T-Concat filter for two-stage inference
  Classifier re;      // directed relation labels
  Classifier aux;     // object entity type

  std::vector<NamedTensor> Tensors();
  std::vector<ConstNamedTensor> Tensors() const;
  HeadParams ZerosLike() const;
};

// Marker feature psi = [h(start marker); h(end marker)]; T-Concat feature =
// [h(text token a); h(text token b)] when requested.
struct SpanRepr {
  std::vector<double> marker;
  std::vector<double> tconcat;
};

// Throws LookupError if `span` has no marker pair in the layout.
SpanRepr SpanRepresentation(const SlotOutputs &outputs,
                            const EncodingLayout &layout, const Span &span,
                            bool with_tconcat);
// T-Concat only; works on any layout containing the span's tokens.
std::vector<double> TconcatFeature(const SlotOutputs &outputs,
                                   const EncodingLayout &layout,
                                   const Span &span);

// Builds the classifier input for `mode` from `repr`.
std::vector<double> NerFeatures(const SpanRepr &repr, NerMode mode);
// Throws ConfigError when `repr` lacks a field `mode` needs or the widths
// disagree.
std::vector<double> NerLogits(const SpanRepr &repr, const Classifier &cls,
                              NerMode mode);

// [h([S]); h([/S]); h(object start marker); h(object end marker)].
// Throws LayoutError for non-pair layouts, LookupError for unknown objects.
std::vector<double> PairRepresentation(const SlotOutputs &outputs,
                                       const EncodingLayout &layout,
                                       const Span &object);

struct ReLogits {
  std::vector<double> relation;
  std::vector<double> object_type;
};

ReLogits RelationLogits(std::span<const double> pair_repr,
                        const HeadParams &heads);

std::vector<double> Softmax(std::span<const double> logits);
// Lowest index among maxima.
int Argmax(std::span<const double> values);

struct BidirectionalScores {
  // scores[l] = p_forward[l] + p_inverse[inverse_of(l)].
  std::vector<double> scores;
  int label = DirectedLabelSpace::kNoRelation;
};

// Ties go to NO_RELATION, then to the lowest label id. Throws ConfigError
// when either vector does not match the label space.
BidirectionalScores CombineBidirectional(std::span<const double> forward,
                                         std::span<const double> inverse,
                                         const DirectedLabelSpace &space);

// Softmax cross-entropy. Fills d(loss)/d(logits) when `d_logits` is given.
// Throws DataError if `gold` is out of range.
double CrossEntropy(std::span<const double> logits, int gold,
                    std::vector<double> *d_logits = nullptr);

struct NerTarget {
  std::vector<double> logits;
  int gold = 0;
};

struct ReTarget {
  std::vector<double> relation_logits;
  std::vector<double> object_type_logits;
  int gold_relation = 0;
  int gold_object_type = 0;
};

// Mean per-instance losses. RE adds aux_weight times the object-type loss.
double NerTrainingLoss(std::span<const NerTarget> targets);
double ReTrainingLoss(std::span<const ReTarget> targets, double aux_weight);

}  // namespace plm

#endif  // PLM_HEADS_H_
