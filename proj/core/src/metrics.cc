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

#include "plm/metrics.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "plm/errors.h"

namespace plm {

namespace {

template <typename T>
std::set<T> AsSet(const std::vector<T> &items) {
  return std::set<T>(items.begin(), items.end());
}

std::string Format(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

const std::string *TypeOf(const EntityTypeMap &types, const std::string &doc,
                          const Span &span) {
  auto it = types.find({doc, span});
  return it == types.end() ? nullptr : &it->second;
}

}  // namespace

EvalReport EvalReport::FromCounts(long true_positive, long predicted,
                                  long gold) {
  EvalReport report;
  report.true_positive = true_positive;
  report.predicted = predicted;
  report.gold = gold;
  report.precision =
      predicted == 0 ? 0.0 : static_cast<double>(true_positive) / predicted;
  report.recall = gold == 0 ? 0.0 : static_cast<double>(true_positive) / gold;
  const double sum = report.precision + report.recall;
  report.f1 = sum == 0.0 ? 0.0 : 2.0 * report.precision * report.recall / sum;
  return report;
}

std::string EvalReport::ToText(const std::string &name) const {
  std::ostringstream out;
  out << name << ": P=" << Format(precision) << " R=" << Format(recall)
      << " F1=" << Format(f1) << " (tp=" << true_positive
      << " pred=" << predicted << " gold=" << gold << ")";
  return out.str();
}

std::string EvalReport::ToKeyValues(const std::string &name) const {
  std::ostringstream out;
  out << name << ".precision=" << Format(precision) << '\n'
      << name << ".recall=" << Format(recall) << '\n'
      << name << ".f1=" << Format(f1) << '\n'
      << name << ".tp=" << true_positive << '\n'
      << name << ".pred=" << predicted << '\n'
      << name << ".gold=" << gold << '\n';
  return out.str();
}

EvalReport NerF1(const std::vector<EntityKey> &gold,
                 const std::vector<EntityKey> &pred) {
  const std::set<EntityKey> gold_set = AsSet(gold);
  const std::set<EntityKey> pred_set = AsSet(pred);
  long tp = 0;
  for (const EntityKey &key : pred_set) tp += gold_set.count(key);
  return EvalReport::FromCounts(tp, static_cast<long>(pred_set.size()),
                                static_cast<long>(gold_set.size()));
}

std::vector<RelationKey> ExpandSymmetric(
    const std::vector<RelationKey> &relations,
    const std::vector<std::string> &symmetric) {
  std::vector<RelationKey> expanded;
  for (const RelationKey &r : relations) {
    expanded.push_back(r);
    if (std::find(symmetric.begin(), symmetric.end(), r.label) !=
        symmetric.end()) {
      expanded.push_back({r.doc_id, r.object, r.subject, r.label});
    }
  }
  return expanded;
}

EntityTypeMap MakeEntityTypeMap(const std::vector<EntityKey> &entities) {
  EntityTypeMap types;
  for (const EntityKey &e : entities) types.emplace(std::pair(e.doc_id, e.span), e.label);
  return types;
}

EvalReport RelF1(const std::vector<RelationKey> &gold,
                 const std::vector<RelationKey> &pred,
                 const EntityTypeMap *gold_types,
                 const EntityTypeMap *pred_types, RelMode mode) {
  if (mode == RelMode::kStrict &&
      (gold_types == nullptr || pred_types == nullptr)) {
    throw ConfigError("strict relation scoring needs gold and predicted "
                      "entity types");
  }
  const std::set<RelationKey> gold_set = AsSet(gold);
  const std::set<RelationKey> pred_set = AsSet(pred);
  long tp = 0;
  for (const RelationKey &r : pred_set) {
    if (!gold_set.count(r)) continue;
    if (mode == RelMode::kStrict) {
      const std::string *gs = TypeOf(*gold_types, r.doc_id, r.subject);
      const std::string *go = TypeOf(*gold_types, r.doc_id, r.object);
      const std::string *ps = TypeOf(*pred_types, r.doc_id, r.subject);
      const std::string *po = TypeOf(*pred_types, r.doc_id, r.object);
      if (!gs || !go || !ps || !po || *gs != *ps || *go != *po) continue;
    }
    ++tp;
  }
  return EvalReport::FromCounts(tp, static_cast<long>(pred_set.size()),
                                static_cast<long>(gold_set.size()));
}

std::vector<EntityKey> EntityKeys(const Corpus &corpus) {
  std::vector<EntityKey> keys;
  for (const Document &doc : corpus) {
    for (const EntityMention &e : doc.entities) {
      keys.push_back({doc.doc_id, e.span, e.label});
    }
  }
  return keys;
}

std::vector<RelationKey> RelationKeys(const Corpus &corpus) {
  std::vector<RelationKey> keys;
  for (const Document &doc : corpus) {
    for (const RelationMention &r : doc.relations) {
      keys.push_back({doc.doc_id, r.subject, r.object, r.label});
    }
  }
  return keys;
}

CorpusEvaluation EvaluateCorpus(const Corpus &gold, const Corpus &pred,
                                const std::vector<std::string> &symmetric) {
  const std::vector<EntityKey> gold_entities = EntityKeys(gold);
  const std::vector<EntityKey> pred_entities = EntityKeys(pred);
  const EntityTypeMap gold_types = MakeEntityTypeMap(gold_entities);
  const EntityTypeMap pred_types = MakeEntityTypeMap(pred_entities);
  const std::vector<RelationKey> gold_relations =
      ExpandSymmetric(RelationKeys(gold), symmetric);
  const std::vector<RelationKey> pred_relations =
      ExpandSymmetric(RelationKeys(pred), symmetric);
  CorpusEvaluation eval;
  eval.entities = NerF1(gold_entities, pred_entities);
  eval.relations = RelF1(gold_relations, pred_relations, &gold_types,
                         &pred_types, RelMode::kBoundaries);
  eval.strict_relations = RelF1(gold_relations, pred_relations, &gold_types,
                                &pred_types, RelMode::kStrict);
  return eval;
}

}  // namespace plm
