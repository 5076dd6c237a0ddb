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

#include "plm/spanspace.h"

#include <algorithm>
#include <random>

#include "plm/errors.h"

namespace plm {

namespace {

std::vector<SpanGroup> Chunk(const std::vector<Span> &spans, int group_size) {
  if (group_size < 1) {
    throw ConfigError("group size must be positive, got " +
                      std::to_string(group_size));
  }
  std::vector<SpanGroup> groups;
  for (size_t i = 0; i < spans.size(); i += group_size) {
    SpanGroup group;
    group.group_index = static_cast<int>(groups.size());
    const size_t last = std::min(spans.size(), i + group_size);
    group.spans.assign(spans.begin() + i, spans.begin() + last);
    groups.push_back(std::move(group));
  }
  return groups;
}

}  // namespace

std::string ToString(PackingStrategy strategy) {
  return strategy == PackingStrategy::kNeighborhood ? "neighborhood" : "random";
}

PackingStrategy ParsePackingStrategy(const std::string &name) {
  if (name == "neighborhood") return PackingStrategy::kNeighborhood;
  if (name == "random") return PackingStrategy::kRandom;
  throw ConfigError("unknown packing strategy '" + name +
                    "' (expected neighborhood or random)");
}

std::vector<Span> EnumerateSpans(int n, int max_length) {
  if (max_length < 1) {
    throw ConfigError("max span length must be positive, got " +
                      std::to_string(max_length));
  }
  std::vector<Span> spans;
  for (int a = 1; a <= n; ++a) {
    for (int b = a; b <= std::min(n, a + max_length - 1); ++b) {
      spans.push_back({a, b});
    }
  }
  return spans;
}

std::vector<SpanGroup> NeighborhoodPack(std::vector<Span> spans,
                                        int group_size) {
  std::sort(spans.begin(), spans.end());
  return Chunk(spans, group_size);
}

std::vector<SpanGroup> RandomPack(std::vector<Span> spans, int group_size,
                                  uint64_t seed) {
  // Shuffle from a canonical order so the result depends only on the span
  // set and the seed.
  std::sort(spans.begin(), spans.end());
  std::mt19937_64 rng(seed);
  for (size_t i = spans.size(); i > 1; --i) {
    std::uniform_int_distribution<size_t> pick(0, i - 1);
    std::swap(spans[i - 1], spans[pick(rng)]);
  }
  std::vector<SpanGroup> groups = Chunk(spans, group_size);
  for (SpanGroup &group : groups) {
    std::sort(group.spans.begin(), group.spans.end());
  }
  return groups;
}

std::vector<SpanGroup> Pack(std::vector<Span> spans, int group_size,
                            PackingStrategy strategy, uint64_t seed) {
  if (strategy == PackingStrategy::kNeighborhood) {
    return NeighborhoodPack(std::move(spans), group_size);
  }
  return RandomPack(std::move(spans), group_size, seed);
}

DirectedLabelSpace::DirectedLabelSpace()
    : names_{kNoRelationName}, inverse_{kNoRelation}, is_inverse_{0} {}

DirectedLabelSpace::DirectedLabelSpace(
    const std::vector<std::string> &relation_types,
    const std::vector<std::string> &symmetric)
    : DirectedLabelSpace() {
  for (const std::string &label : symmetric) {
    if (std::find(relation_types.begin(), relation_types.end(), label) ==
        relation_types.end()) {
      throw ConfigError("symmetric label '" + label +
                        "' is not a relation type");
    }
  }
  auto is_symmetric = [&](const std::string &label) {
    return std::find(symmetric.begin(), symmetric.end(), label) !=
           symmetric.end();
  };
  for (const std::string &label : relation_types) {
    if (label == kNoRelationName || Find(label) >= 0) {
      throw ConfigError("relation type '" + label + "' is reserved or repeated");
    }
    names_.push_back(label);
    inverse_.push_back(static_cast<int>(names_.size()) - 1);
    is_inverse_.push_back(0);
  }
  const int forward_count = static_cast<int>(names_.size());
  for (int id = 1; id < forward_count; ++id) {
    if (is_symmetric(names_[id])) continue;
    const std::string inverse_name = names_[id] + kInverseSuffix;
    if (std::find(names_.begin(), names_.end(), inverse_name) != names_.end()) {
      throw ConfigError("inverse label '" + inverse_name +
                        "' collides with a relation type");
    }
    names_.push_back(inverse_name);
    const int inverse_id = static_cast<int>(names_.size()) - 1;
    inverse_.push_back(id);
    is_inverse_.push_back(1);
    inverse_[id] = inverse_id;
  }
}

int DirectedLabelSpace::Find(const std::string &name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

DirectedLabelSpace BuildDirectedLabelSpace(
    const std::vector<std::string> &relation_types,
    const std::vector<std::string> &symmetric) {
  return DirectedLabelSpace(relation_types, symmetric);
}

std::map<std::pair<Span, Span>, int> DirectedGoldLabels(
    const DirectedLabelSpace &space,
    const std::vector<RelationMention> &relations) {
  std::map<std::pair<Span, Span>, int> gold;
  for (const RelationMention &r : relations) {
    const int id = space.Find(r.label);
    if (id <= 0 || space.is_inverse(id)) {
      throw DataError("relation type '" + r.label + "' is not in the schema");
    }
    gold[{r.subject, r.object}] = id;
    gold[{r.object, r.subject}] = space.inverse_of(id);
  }
  return gold;
}

std::vector<SubjectCandidates> CandidatePairs(
    const std::vector<EntityMention> &entities) {
  std::vector<Span> spans;
  for (const EntityMention &e : entities) spans.push_back(e.span);
  std::sort(spans.begin(), spans.end());
  spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
  std::vector<SubjectCandidates> result;
  for (const Span &subject : spans) {
    SubjectCandidates candidates{subject, {}};
    for (const Span &object : spans) {
      if (object != subject) candidates.objects.push_back(object);
    }
    result.push_back(std::move(candidates));
  }
  return result;
}

}  // namespace plm
