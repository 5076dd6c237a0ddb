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

#ifndef PLM_SYNTHETIC_H_
#define PLM_SYNTHETIC_H_

#include <cstdint>

#include "plm/corpus.h"

namespace plm {

// Seeded toy corpus with PER/ORG/LOC entities and four relation types
// (KNOWS is symmetric). Entity words and filler words are disjoint, and
// relations follow from the ordered type pair, so the data is learnable.
struct SyntheticOptions {
  int documents = 40;
  int sentences_per_document = 3;
  int max_entities = 4;
  // Filler words before each entity.
  int min_gap = 1;
  int max_gap = 3;
  // Sentences are padded with fillers up to this many tokens.
  int min_sentence_length = 0;
  uint64_t seed = 7;
};

Corpus GenerateSyntheticCorpus(const SyntheticOptions &options);

LabelSchema SyntheticSchema();

}  // namespace plm

#endif  // PLM_SYNTHETIC_H_
