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

#ifndef PLM_METRICS_H_
#define PLM_METRICS_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "plm/corpus.h"
#include "plm/span.h"

namespace plm {

// Micro-averaged exact-match scores; 0/0 is taken as 0.
struct EvalReport {
  long true_positive = 0;
  long predicted = 0;
  long gold = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static EvalReport FromCounts(long true_positive, long predicted, long gold);
  // "name: P=... R=... F1=... (tp/pred/gold)".
  std::string ToText(const std::string &name) const;
  // "name.precision=..." lines.
  std::string ToKeyValues(const std::string &name) const;
};

struct EntityKey {
  std::string doc_id;
  Span span;
  std::string label;

  friend auto operator<=>(const EntityKey &, const EntityKey &) = default;
  friend bool operator==(const EntityKey &, const EntityKey &) = default;
};

struct RelationKey {
  std::string doc_id;
  Span subject;
  Span object;
  std::string label;

  friend auto operator<=>(const RelationKey &, const RelationKey &) = default;
  friend bool operator==(const RelationKey &, const RelationKey &) = default;
};

// Duplicate keys collapse before counting.
EvalReport NerF1(const std::vector<EntityKey> &gold,
                 const std::vector<EntityKey> &pred);

// Symmetric instances contribute both directions; others pass through.
std::vector<RelationKey> ExpandSymmetric(
    const std::vector<RelationKey> &relations,
    const std::vector<std::string> &symmetric);

enum class RelMode { kBoundaries, kStrict };

// (doc_id, span) -> entity type.
using EntityTypeMap = std::map<std::pair<std::string, Span>, std::string>;

EntityTypeMap MakeEntityTypeMap(const std::vector<EntityKey> &entities);

// Boundaries mode matches (subject, object, label); strict mode also needs
// the predicted types of both endpoints to equal the gold types. Strict mode
// throws ConfigError when either type map is missing.
EvalReport RelF1(const std::vector<RelationKey> &gold,
                 const std::vector<RelationKey> &pred,
                 const EntityTypeMap *gold_types,
                 const EntityTypeMap *pred_types, RelMode mode);

std::vector<EntityKey> EntityKeys(const Corpus &corpus);
std::vector<RelationKey> RelationKeys(const Corpus &corpus);

struct CorpusEvaluation {
  EvalReport entities;
  EvalReport relations;         // Rel
  EvalReport strict_relations;  // Rel+
};

// Scores `pred` against `gold`, expanding symmetric relations on both sides.
CorpusEvaluation EvaluateCorpus(const Corpus &gold, const Corpus &pred,
                                const std::vector<std::string> &symmetric);

}  // namespace plm

#endif  // PLM_METRICS_H_
