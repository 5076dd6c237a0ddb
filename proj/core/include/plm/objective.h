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

#ifndef PLM_OBJECTIVE_H_
#define PLM_OBJECTIVE_H_

#include <cstdint>
#include <vector>

#include "plm/encoder.h"
#include "plm/heads.h"
#include "plm/layout.h"

namespace plm {

// One span layout with a gold NER class per marker pair.
struct NerInstance {
  EncodingLayout layout;
  std::vector<int> labels;  // indexed by pair ordinal
};

// One subject layout with gold labels per object pair.
struct ReInstance {
  EncodingLayout layout;
  std::vector<int> relations;     // directed label ids
  std::vector<int> object_types;  // entity type indices (no NONE)
};

struct TrainingBatch {
  std::vector<NerInstance> ner;
  std::vector<ReInstance> re;
  double aux_weight = 1.0;

  int num_targets() const;
};

struct LossAndGradient {
  double loss = 0.0;
  EncoderParams encoder_grad;
  HeadParams head_grad;
};

// Mean loss over all targets in the batch. NER spans contribute the marker
// head loss plus the stage-1 T-Concat loss when that head exists; RE pairs
// contribute relation loss plus aux_weight times object-type loss.
double BatchLoss(const EncoderParams &params, const HeadParams &heads,
                 const TrainingBatch &batch);

// BatchLoss and its analytic gradient with respect to every tensor of
// `params` and `heads`.
LossAndGradient LossAndGrad(const EncoderParams &params,
                            const HeadParams &heads,
                            const TrainingBatch &batch);

struct FiniteDiffReport {
  double max_relative_error = 0.0;
  int coordinates = 0;
  // Sampled coordinates where either gradient exceeds the noise floor.
  int nonzero = 0;
  // Magnitude below which both gradients are treated as zero.
  double noise_floor = 0.0;
};

// Compares analytic gradients with central differences on `sample` uniformly
// drawn coordinates of the encoder and, when `include_heads`, the heads.
// Relative error is |a - n| / max(|a|, |n|), with 0 when both lie under the
// noise floor.
FiniteDiffReport FiniteDiffCheck(const EncoderParams &params,
                                 const HeadParams &heads,
                                 const TrainingBatch &batch, double epsilon,
                                 int sample, uint64_t seed,
                                 bool include_heads = true);

}  // namespace plm

#endif  // PLM_OBJECTIVE_H_
