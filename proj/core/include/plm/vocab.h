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

#ifndef PLM_VOCAB_H_
#define PLM_VOCAB_H_

#include <string>
#include <unordered_map>
#include <vector>

#include "plm/corpus.h"

namespace plm {

// Ids of the six marker tokens. They are never produced by text lookup.
struct MarkerVocab {
  int span_start = -1;
  int span_end = -1;
  int subj_start = -1;
  int subj_end = -1;
  int obj_start = -1;
  int obj_end = -1;
};

// Word-level vocabulary. Ids 0..2 are [UNK], [MASK] and "entity" (the latter
// two seed marker embeddings), 3..8 are markers, corpus words follow.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kMask = 1;
  static constexpr int kEntityWord = 2;
  static constexpr int kNumReserved = 9;

  Vocabulary();

  // Reserved entries plus every token of `corpus` in first-seen order.
  static Vocabulary Build(const Corpus &corpus);
  // Restores a vocabulary from its full word list (reserved entries first).
  static Vocabulary FromWords(const std::vector<std::string> &words);

  int Add(const std::string &word);
  // kUnk for unknown tokens. Marker names are not reachable from text.
  int Id(const std::string &token) const;
  std::vector<int> Ids(const std::vector<std::string> &tokens) const;

  int size() const { return static_cast<int>(words_.size()); }
  const std::string &word(int id) const { return words_.at(id); }
  const std::vector<std::string> &words() const { return words_; }
  const MarkerVocab &markers() const { return markers_; }
  bool IsMarker(int id) const { return id >= 3 && id < kNumReserved; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
  MarkerVocab markers_;
};

}  // namespace plm

#endif  // PLM_VOCAB_H_
