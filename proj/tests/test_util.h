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

#ifndef PLM_TESTS_TEST_UTIL_H_
#define PLM_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "plm/corpus.h"
#include "plm/layout.h"
#include "plm/vocab.h"

namespace plm::testing {

// Document with tokens w1..wn split into sentences of the given lengths.
inline Document MakeDocument(const std::vector<int> &sentence_lengths,
                             const std::string &doc_id = "d") {
  Document doc;
  doc.doc_id = doc_id;
  for (int length : sentence_lengths) {
    const int start = doc.num_tokens() + 1;
    for (int i = 0; i < length; ++i) {
      doc.tokens.push_back("w" + std::to_string(doc.num_tokens() + 1));
    }
    doc.sentence_bounds.push_back({start, doc.num_tokens()});
  }
  return doc;
}

// Single-sentence document drawn from a `vocab_words`-word vocabulary.
inline Document RandomSentence(std::mt19937_64 &rng, int length,
                               int vocab_words) {
  Document doc;
  doc.doc_id = "r";
  std::uniform_int_distribution<int> word(0, vocab_words - 1);
  for (int i = 0; i < length; ++i) {
    doc.tokens.push_back("v" + std::to_string(word(rng)));
  }
  doc.sentence_bounds.push_back({1, length});
  return doc;
}

inline Vocabulary NumberedVocabulary(int words) {
  std::vector<std::string> all = Vocabulary().words();
  for (int i = 0; i < words; ++i) all.push_back("v" + std::to_string(i));
  return Vocabulary::FromWords(all);
}

inline std::vector<EntityMention> RandomEntities(std::mt19937_64 &rng, int n,
                                                 int count, int max_len) {
  std::vector<EntityMention> entities;
  std::uniform_int_distribution<int> start(1, n);
  std::uniform_int_distribution<int> len(1, max_len);
  for (int tries = 0; tries < 50 && static_cast<int>(entities.size()) < count;
       ++tries) {
    const int a = start(rng);
    const Span span{a, std::min(n, a + len(rng) - 1)};
    bool dup = false;
    for (const EntityMention &e : entities) dup = dup || e.span == span;
    if (!dup) entities.push_back({span, "T"});
  }
  return entities;
}

// Visibility re-derived from slot roles and the origin map alone.
inline std::vector<uint8_t> ExpectedVisibility(const EncodingLayout &layout) {
  const int n = layout.num_slots();
  std::vector<int> partner(n, -1);
  std::map<int, std::vector<int>> by_pair;
  for (const auto &[slot, origin] : layout.origin) {
    by_pair[origin.pair].push_back(slot);
  }
  for (const auto &[pair, slots] : by_pair) {
    if (slots.size() == 2) {
      partner[slots[0]] = slots[1];
      partner[slots[1]] = slots[0];
    }
  }
  std::vector<uint8_t> mask(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const bool j_stream = !IsLevitated(layout.slot_roles[j]);
      const bool i_stream = !IsLevitated(layout.slot_roles[i]);
      bool v = j_stream;
      if (!i_stream) v = v || i == j || partner[i] == j;
      mask[static_cast<size_t>(i) * n + j] = v ? 1 : 0;
    }
  }
  return mask;
}

}  // namespace plm::testing

#endif  // PLM_TESTS_TEST_UTIL_H_
