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

#ifndef PLM_PIPELINE_H_
#define PLM_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "plm/corpus.h"
#include "plm/encoder.h"
#include "plm/heads.h"
#include "plm/spanspace.h"
#include "plm/vocab.h"

namespace plm {

// Every knob of a training run. Defaults are sized for desk-scale models
// trained from scratch.
struct TrainConfig {
  double learning_rate = 3e-3;
  double warmup_fraction = 0.1;
  int epochs = 30;
  int batch_size = 8;
  int group_size = 256;
  int max_span_length = 8;
  int context_window = 64;
  PackingStrategy packing = PackingStrategy::kNeighborhood;
  double aux_weight = 1.0;
  uint64_t seed = 42;

  int hidden_dim = 32;
  int num_layers = 2;
  int num_heads = 2;
  int ffn_dim = 64;
  int head_hidden = 64;
  NerMode ner_mode = NerMode::kMarkerPlusTconcat;
  // Train the T-Concat filter head used by two-stage inference.
  bool stage1 = true;
  // Seed marker embeddings from "[MASK]" and "entity".
  bool prompt_init = true;
  // Overlapping entity predictions are kept instead of resolved.
  bool nested = false;
  std::vector<std::string> symmetric;

  // Throws ConfigError.
  void Validate() const;
  // Sets one field from its textual form. Keys use snake_case field names.
  void Set(const std::string &key, const std::string &value);
  // Every field as (key, value) in a fixed order.
  std::vector<std::pair<std::string, std::string>> Items() const;

  static std::vector<std::string> Keys();
};

// `key = value` lines; '#' starts a comment. Unknown keys are errors.
void ApplyConfig(std::istream &in, TrainConfig *config);
TrainConfig LoadConfigFile(const std::string &path, TrainConfig base = {});

enum class ModelTask { kNer, kRe };

// Everything needed to run a trained model.
struct ModelBundle {
  ModelTask task = ModelTask::kNer;
  TrainConfig config;
  LabelSchema schema;
  DirectedLabelSpace relation_space;
  Vocabulary vocab;
  EncoderParams encoder;
  HeadParams heads;
  // Share of relations covered by their most frequent type pair in the
  // training data (RE models).
  double relation_dominance = 0.0;

  int max_slots() const { return encoder.config.max_slots; }
};

struct EpochReport {
  int epoch = 0;
  double mean_loss = 0.0;
  double last_rate = 0.0;
};

using ProgressCallback = std::function<void(const EpochReport &)>;

// The untrained NER model that TrainNer starts from: vocabulary from
// `corpus`, seeded encoder and heads.
ModelBundle InitNerModel(const Corpus &corpus, const LabelSchema &schema,
                         const TrainConfig &config);

// Throws DataError on an empty corpus or labels outside `schema`.
ModelBundle TrainNer(const Corpus &corpus, const LabelSchema &schema,
                     const TrainConfig &config,
                     const ProgressCallback &progress = {});
ModelBundle TrainRe(const Corpus &corpus, const LabelSchema &schema,
                    const TrainConfig &config,
                    const ProgressCallback &progress = {});

struct PredictOptions {
  int group_size = 256;
  PackingStrategy packing = PackingStrategy::kNeighborhood;
  uint64_t seed = 0;
  // > 0 enables two-stage NER: the T-Concat head keeps the top-M spans of
  // each sentence and only those are scored with markers.
  int two_stage_top_m = 0;
  int threads = 1;
};

struct PredictStats {
  long sentences = 0;
  // Encoder passes, including stage-1 text-only passes.
  long layouts = 0;
  long slots = 0;
  long text_passes = 0;
  long spans_scored = 0;

  void Add(const PredictStats &other);
};

struct ScoredEntity {
  EntityMention mention;
  double score = 0.0;
};

struct ScoredRelation {
  RelationMention mention;
  double score = 0.0;
};

struct DocumentPrediction {
  std::string doc_id;
  std::vector<ScoredEntity> entities;
  std::vector<ScoredRelation> relations;
  // Entity types voted by the RE auxiliary head for relation participants.
  std::map<Span, std::vector<std::string>> type_votes;
};

using PipelineOutput = std::vector<DocumentPrediction>;

// One-stage: every enumerated span is scored in packed groups. Two-stage:
// the T-Concat head of `stage1` (or of `model` when null) proposes
// candidates first. Throws ConfigError when two-stage is requested and no
// stage-1 head exists.
PipelineOutput PredictNer(const ModelBundle &model, const Corpus &corpus,
                          const PredictOptions &options,
                          PredictStats *stats = nullptr,
                          const ModelBundle *stage1 = nullptr);

// Scores every directed pair of the given entities per sentence and emits
// forward-labelled relations. `entities` must align with `corpus`.
PipelineOutput PredictRe(const ModelBundle &model, const Corpus &corpus,
                         const PipelineOutput &entities,
                         const PredictOptions &options,
                         PredictStats *stats = nullptr);

// Sum over labels of the count of the label's most frequent (subject type,
// object type) pair, divided by the number of relations. Throws DataError
// when the corpus has no relations.
double RelationTypeStatistic(const Corpus &corpus);

// With dominance >= threshold, entities with aux-head votes take the
// majority type (ties keep the NER type). Otherwise returns `predictions`.
PipelineOutput RefineEntityTypes(const PipelineOutput &predictions,
                                 double dominance, double threshold);

// Gold entities of `corpus` as predictions with score 1.
PipelineOutput GoldEntities(const Corpus &corpus);

// Copies `corpus` replacing entities and relations with the predictions.
Corpus ToCorpus(const Corpus &corpus, const PipelineOutput &predictions);

// JSONL in the input schema plus "ner_scores" / "relation_scores" lists
// parallel to "ner" / "relations".
void WritePredictions(const Corpus &corpus, const PipelineOutput &predictions,
                      std::ostream &out);

}  // namespace plm

#endif  // PLM_PIPELINE_H_
