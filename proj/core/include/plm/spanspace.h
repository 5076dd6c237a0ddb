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

#ifndef PLM_SPANSPACE_H_
#define PLM_SPANSPACE_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "plm/corpus.h"
#include "plm/span.h"

namespace plm {

// Spans sorted by (start, end) that share one encoding pass.
struct SpanGroup {
  std::vector<Span> spans;
  int group_index = 0;

  int size() const { return static_cast<int>(spans.size()); }
};

enum class PackingStrategy { kNeighborhood, kRandom };

std::string ToString(PackingStrategy strategy);
// Accepts "neighborhood" or "random"; throws ConfigError otherwise.
PackingStrategy ParsePackingStrategy(const std::string &name);

// All spans (a, b) with 1 <= a <= b <= n and b - a + 1 <= max_length, in
// (start, end) order.
std::vector<Span> EnumerateSpans(int n, int max_length);

// Sorts spans and cuts them greedily into groups of at most `group_size`.
std::vector<SpanGroup> NeighborhoodPack(std::vector<Span> spans,
                                        int group_size);

// Seeded uniform shuffle, then chunking. Each group is re-sorted so layouts
// are built in canonical order whatever the strategy.
std::vector<SpanGroup> RandomPack(std::vector<Span> spans, int group_size,
                                  uint64_t seed);

std::vector<SpanGroup> Pack(std::vector<Span> spans, int group_size,
                            PackingStrategy strategy, uint64_t seed);

// Relation labels closed under inversion. Id 0 is NO_RELATION; forward labels
// follow in schema order, then one inverse per asymmetric label.
class DirectedLabelSpace {
 public:
  static constexpr int kNoRelation = 0;
  static constexpr const char *kNoRelationName = "NO_RELATION";
  static constexpr const char *kInverseSuffix = "_INV";

  DirectedLabelSpace();
  // Throws ConfigError if `symmetric` names an unknown relation.
  DirectedLabelSpace(const std::vector<std::string> &relation_types,
                     const std::vector<std::string> &symmetric);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string &name(int id) const { return names_.at(id); }
  int inverse_of(int id) const { return inverse_.at(id); }
  bool is_inverse(int id) const { return is_inverse_.at(id) != 0; }
  bool is_symmetric(int id) const {
    return id != kNoRelation && inverse_.at(id) == id;
  }
  // Id of a label name, including "X_INV" names; -1 when unknown.
  int Find(const std::string &name) const;
  const std::vector<std::string> &names() const { return names_; }

  friend bool operator==(const DirectedLabelSpace &,
                         const DirectedLabelSpace &) = default;

 private:
  std::vector<std::string> names_;
  std::vector<int> inverse_;
  std::vector<char> is_inverse_;
};

DirectedLabelSpace BuildDirectedLabelSpace(
    const std::vector<std::string> &relation_types,
    const std::vector<std::string> &symmetric);

// Gold label of every ordered pair touched by `relations`: (s, o) maps to
// the label id and (o, s) to its inverse, so a symmetric label appears under
// the same id in both directions. Throws DataError on labels outside `space`.
std::map<std::pair<Span, Span>, int> DirectedGoldLabels(
    const DirectedLabelSpace &space,
    const std::vector<RelationMention> &relations);

struct SubjectCandidates {
  Span subject;
  std::vector<Span> objects;
};

// One entry per entity, in (start, end) order; objects are every other
// entity span, also sorted. Duplicate spans are collapsed first.
std::vector<SubjectCandidates> CandidatePairs(
    const std::vector<EntityMention> &entities);

}  // namespace plm

#endif  // PLM_SPANSPACE_H_
